//! Evaluate `ln u_n`, locate the corridor minimum of `v_n` and verify the gluing properties.

use ternlab::geometry::{EpsilonSpec, TernaryParams};
use ternlab::subharmonic::{corridor_v_min, verify_sh, SubharmonicEvaluator};
use ternlab::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = TernaryParams::build(EpsilonSpec::Geometric, 4)?;
    let eval = SubharmonicEvaluator::new(params.clone(), 20.0, 3)?;
    for n in 1..=3 {
        println!("log M_B({n}) = {:.6e}", eval.majorants().log_m(n));
    }
    for z in [Complex64::new(0.0, 0.0), Complex64::new(1.3, 0.4), Complex64::new(12.0, -7.0)] {
        println!("ln u_3({z}) = {:.6e}", eval.ln_u(3, z)?);
    }
    for n in 1..=3 {
        let m = corridor_v_min(&params, n, 512 * 512);
        println!("level {n}: min v = {:.9} at ({:.4}, {:.4})", m.min_v, m.argmin.0, m.argmin.1);
    }
    for n in 1..=3 {
        let r = verify_sh(&eval, n, 256)?;
        println!(
            "level {n}: (i) {:.1e}, (ii) margin {:.4}, (iii) margin {:.4}",
            r.prop_i_maxdiff, r.prop_ii_margin_log, r.prop_iii_margin_log
        );
    }
    Ok(())
}
