//! Goodness statistics, the disk-maximum chain and the square-selection chain
//! for a sampled subharmonic field.

use std::f64::consts::PI;
use ternlab::field::GridField;
use ternlab::geometry::Square;
use ternlab::growth::{adi_certify, goodness_stats, levsasha_select, lower_bound_report, submean_check};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // max(0, Re cos 2πz) vanishes on half of every unit square and exceeds 1 in each.
    let field = GridField::sample(&Square::centered(8.0), 256, false, |z| (2.0 * PI * z).cos().re.max(0.0));
    let s = submean_check(&field, 128, 140, 5.0 * field.h)?;
    println!("sub-mean defect at (128, 140): {:.3e} (tolerance {:.3e})", s.defect, s.tolerance);

    let gamma = 0.5;
    let goodness = goodness_stats(&field, gamma, 0.0)?;
    println!("{:?}", goodness.summary());

    let chain = adi_certify(&field, &goodness, 0.1, 2, 1e-3)?;
    println!(
        "disk chain: {} normal steps, certified log growth {:.3}, bound {:.3}, all steps ok: {}",
        chain.chain_normal_steps, chain.certified_log_growth, chain.bound_log_growth, chain.all_normal_steps_ok
    );

    let sel = levsasha_select(&goodness, None, None)?;
    let cases: Vec<u8> = sel.steps.iter().map(|s| s.case).collect();
    println!("selection: k = {}, cases {cases:?}, min beta ratio {:.3}", sel.k, sel.min_beta_ratio);
    let c = -(1.0 - gamma / (PI * 4.0)).ln();
    let report = lower_bound_report(&sel, c)?;
    println!("certified log growth {:.4}, reference {:.4}", report.certified_log_growth, report.reference_bound_log);
    Ok(())
}
