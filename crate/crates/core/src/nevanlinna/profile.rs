use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use super::handle::MeromorphicHandle;
use super::NevanlinnaError;
use crate::quadrature::gauss_legendre_on;

const GRADED_PIECES: i32 = 40;

/// Quadrature layout for [`tfr_profile`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileOptions {
    /// Number of radial subintervals; profile values are reported at their ends.
    pub intervals: usize,
    /// Gauss–Legendre order per subinterval.
    pub radial_order: usize,
    /// Trapezoid nodes per circle (even).
    pub angular: usize,
    /// Relative error estimate above which the profile is rejected.
    pub tolerance: f64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions { intervals: 64, radial_order: 6, angular: 256, tolerance: 1e-3 }
    }
}

/// Spherical area `a(r)` and Ahlfors–Shimizu characteristic `T(r)` on a radius grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NevanlinnaProfile {
    pub radii: Vec<f64>,
    pub a: Vec<f64>,
    pub t: Vec<f64>,
    /// Estimated absolute error of `a` and `T` at each radius.
    pub a_error: Vec<f64>,
    pub t_error: Vec<f64>,
}

impl NevanlinnaProfile {
    /// Linear interpolation in the radius grid.
    pub fn t_at(&self, r: f64) -> f64 {
        interpolate(&self.radii, &self.t, r)
    }

    pub fn a_at(&self, r: f64) -> f64 {
        interpolate(&self.radii, &self.a, r)
    }

    /// Mean of `(F^#)²` over the disk of radius `r`.
    pub fn disk_average(&self, r: f64) -> f64 {
        self.a_at(r) / (r * r)
    }

    pub fn is_monotone(&self) -> bool {
        self.a.windows(2).all(|w| w[1] >= w[0]) && self.t.windows(2).all(|w| w[1] >= w[0])
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["r", "a_r", "T"])?;
        for ((r, a), t) in self.radii.iter().zip(&self.a).zip(&self.t) {
            out.write_record([r.to_string(), a.to_string(), t.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let last = xs.len() - 1;
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[last] {
        return ys[last];
    }
    let k = xs.partition_point(|&v| v <= x).min(last);
    let (x0, x1) = (xs[k - 1], xs[k]);
    ys[k - 1] + (ys[k] - ys[k - 1]) * (x - x0) / (x1 - x0)
}

/// Circle integral `ρ ∫ (F^#)² dθ` by the trapezoid rule with `m` nodes, and
/// the same with the even nodes only.
fn circle_integral(f: &MeromorphicHandle, rho: f64, m: usize) -> Result<(f64, f64), NevanlinnaError> {
    let mut full = 0.0;
    let mut half = 0.0;
    for j in 0..m {
        let z = Complex64::from_polar(rho, 2.0 * PI * j as f64 / m as f64);
        let s = f.spherical_derivative(z)?;
        full += s * s;
        if j % 2 == 0 {
            half += s * s;
        }
    }
    let dtheta = 2.0 * PI / m as f64;
    Ok((rho * full * dtheta, rho * half * 2.0 * dtheta))
}

/// `a(r) = (1/π)∫_{r𝔻}(F^#)² dA` and `T(R) = ∫₀^R a(r) dr/r`.
///
/// With `s(ρ) = ρ∮(F^#)²dθ` the characteristic is
/// `T(R) = ln R · a(R) - (1/π)∫₀^R s(ρ) ln ρ dρ`, so both quantities come from
/// cumulative Gauss–Legendre sums over the same radial nodes. The error
/// estimate combines angular halving with a lower radial order.
pub fn tfr_profile(
    f: &MeromorphicHandle,
    r_max: f64,
    opts: &ProfileOptions,
) -> Result<NevanlinnaProfile, NevanlinnaError> {
    if !(r_max > 0.0 && r_max.is_finite()) || opts.intervals == 0 || opts.radial_order < 2 || opts.angular < 4 {
        return Err(NevanlinnaError::InvalidArgument(format!(
            "tfr_profile needs R_max > 0 and nonempty quadrature (R_max = {r_max})"
        )));
    }
    let m = opts.angular + opts.angular % 2;
    let dr = r_max / opts.intervals as f64;
    let coarse_order = (opts.radial_order / 2).max(2);

    let mut nodes = Vec::new();
    for k in 0..opts.intervals {
        let (lo, hi) = (k as f64 * dr, (k + 1) as f64 * dr);
        // The first interval carries the `ρ ln ρ` factor; grade it toward 0.
        let pieces: Vec<(f64, f64)> = if k == 0 {
            (0..GRADED_PIECES).map(|j| (hi * 0.5f64.powi(j + 1), hi * 0.5f64.powi(j))).collect()
        } else {
            vec![(lo, hi)]
        };
        for &(lo, hi) in &pieces {
            for (order, tag) in [(opts.radial_order, 0u8), (coarse_order, 1u8)] {
                let (xs, ws) = gauss_legendre_on(order, lo, hi);
                nodes.extend(xs.into_iter().zip(ws).map(|(x, w)| (k, tag, x, w)));
            }
        }
    }
    let circles: Vec<(f64, f64)> =
        nodes.par_iter().map(|&(_, _, rho, _)| circle_integral(f, rho, m)).collect::<Result<_, _>>()?;

    // Per interval: [∫s, ∫s lnρ] for fine, angular-half and coarse-radial rules.
    let mut sums = vec![[[0.0f64; 2]; 3]; opts.intervals];
    for (&(k, tag, rho, w), &(full, half)) in nodes.iter().zip(&circles) {
        let ln = rho.ln();
        if tag == 0 {
            sums[k][0][0] += w * full;
            sums[k][0][1] += w * full * ln;
            sums[k][1][0] += w * half;
            sums[k][1][1] += w * half * ln;
        } else {
            sums[k][2][0] += w * full;
            sums[k][2][1] += w * full * ln;
        }
    }

    let mut radii = vec![0.0];
    let (mut a, mut t) = (vec![0.0], vec![0.0]);
    let (mut a_error, mut t_error) = (vec![0.0], vec![0.0]);
    let mut acc = [[0.0f64; 2]; 3];
    for (k, s) in sums.iter().enumerate() {
        for v in 0..3 {
            acc[v][0] += s[v][0];
            acc[v][1] += s[v][1];
        }
        let r = (k + 1) as f64 * dr;
        let eval = |v: usize| {
            let a = acc[v][0] / PI;
            (a, r.ln() * a - acc[v][1] / PI)
        };
        let (a0, t0) = eval(0);
        let (a1, t1) = eval(1);
        let (a2, t2) = eval(2);
        radii.push(r);
        a.push(a0);
        t.push(t0);
        a_error.push((a1 - a0).abs() + (a2 - a0).abs());
        t_error.push((t1 - t0).abs() + (t2 - t0).abs());
    }
    let last = radii.len() - 1;
    let scale = t[last].abs().max(a[last].abs()).max(1e-300);
    if t_error[last].max(a_error[last]) > opts.tolerance * scale {
        return Err(NevanlinnaError::QuadratureFailure {
            r: r_max,
            error: t_error[last].max(a_error[last]),
            scale,
        });
    }
    Ok(NevanlinnaProfile { radii, a, t, a_error, t_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nevanlinna::weierstrass::Weierstrass;

    #[test]
    fn identity_closed_form() {
        let p = tfr_profile(&MeromorphicHandle::identity(), 4.0, &ProfileOptions::default()).unwrap();
        for (i, &r) in p.radii.iter().enumerate() {
            assert!((p.a[i] - r * r / (1.0 + r * r)).abs() < 1e-9, "a({r})");
            assert!((p.t[i] - 0.5 * (1.0 + r * r).ln()).abs() < 1e-9, "T({r})");
        }
        assert!((p.t_at(1.0) - 0.346_573_590_279_972_6).abs() < 1e-4);
        assert!(p.is_monotone());
    }

    #[test]
    fn constant_has_zero_characteristic() {
        let p = tfr_profile(&MeromorphicHandle::constant(Complex64::new(2.0, 1.0)), 3.0, &ProfileOptions::default())
            .unwrap();
        assert!(p.t.iter().chain(&p.a).all(|&v| v == 0.0));
    }

    #[test]
    fn builtins_are_monotone_and_vanish_at_zero() {
        let opts = ProfileOptions { intervals: 24, angular: 128, tolerance: 1e-2, ..Default::default() };
        for f in [MeromorphicHandle::power(3), MeromorphicHandle::exp(), MeromorphicHandle::sin()] {
            let p = tfr_profile(&f, 3.0, &opts).unwrap();
            assert_eq!((p.a[0], p.t[0]), (0.0, 0.0));
            assert!(p.is_monotone(), "{}", f.name());
        }
    }

    #[test]
    fn wp_grows_quadratically() {
        let wp = MeromorphicHandle::weierstrass(Weierstrass::square(20.0));
        let opts = ProfileOptions { intervals: 64, radial_order: 6, angular: 512, tolerance: 1e-2 };
        let p = tfr_profile(&wp, 6.0, &opts).unwrap();
        assert!(p.is_monotone());
        let ratio = p.t_at(6.0) / p.t_at(3.0);
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn rejects_bad_radius() {
        assert!(tfr_profile(&MeromorphicHandle::identity(), 0.0, &ProfileOptions::default()).is_err());
    }
}
