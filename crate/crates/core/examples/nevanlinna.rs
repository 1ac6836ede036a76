//! Ahlfors–Shimizu characteristic of `z`, `e^z` and `℘`, winding numbers and
//! recurrence of `sin` under a period shift.

use std::f64::consts::PI;
use ternlab::nevanlinna::{
    compare_t_log_m, recurrence_coverage, tfr_profile, winding_number, Circle, CoverageOptions, MeromorphicHandle,
    ProfileOptions, SphericalDisk, Weierstrass,
};
use ternlab::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let id = tfr_profile(&MeromorphicHandle::identity(), 1.0, &ProfileOptions::default())?;
    println!("T_id(1) = {:.6} (closed form {:.6})", id.t_at(1.0), 0.5 * 2f64.ln());

    let opts = ProfileOptions { intervals: 160, radial_order: 6, angular: 1024, tolerance: 1e-2 };
    let wp = tfr_profile(&MeromorphicHandle::weierstrass(Weierstrass::square(20.0)), 8.0, &opts)?;
    for r in [2.0, 3.0, 4.0] {
        println!("T_wp({}) / T_wp({r}) = {:.4}, disk average {:.4}", 2.0 * r, wp.t_at(2.0 * r) / wp.t_at(r), wp.disk_average(r));
    }

    let cmp = compare_t_log_m(&MeromorphicHandle::exp(), 5.0, 10.0, &ProfileOptions::default())?;
    println!("exp: T(5) - log M(5) = {:.4}, log M(5) - 3 T(10) = {:.4}", cmp.lhs1, cmp.lhs2);

    let unit = Circle::new(Complex64::new(0.0, 0.0), 1.0);
    let w = winding_number(&MeromorphicHandle::power(2), unit, Complex64::new(0.3, 0.1))?;
    println!("index of z^2 about 0.3+0.1i: {} (rounding distance {:.1e})", w.index, w.rounding_distance);

    let target = SphericalDisk { center: Complex64::new(0.0, 0.0), radius: 0.1 };
    for shift in [2.0 * PI, PI, 1.0] {
        let rep = recurrence_coverage(&MeromorphicHandle::sin(), unit, target, Complex64::new(shift, 0.0), &CoverageOptions::default())?;
        println!(
            "sin shifted by {shift:.4}: covered {}, guaranteed {}, perturbation {:.3e}, gap {:.3e}",
            rep.covered, rep.guaranteed, rep.perturbation, rep.delta
        );
    }
    Ok(())
}
