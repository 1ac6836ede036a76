//! Translation averages over `S_n`: ladder fractions, oscillation and tails,
//! with the exact copy-area bounds next to the sampled values.

use ternlab::ergodic::{kb_report, tail_distribution, Ladder, LevelChoice, Scheme, TranslateSampler};
use ternlab::geometry::{EpsilonSpec, TernaryParams};
use ternlab::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = TernaryParams::build(EpsilonSpec::Geometric, 3)?;
    let n = 2;
    let sampler = TranslateSampler::new(params.s(n), Scheme::Seeded { count: 100_000, seed: 1 });
    let f = |z: Complex64| z * 0.5;

    let kb = kb_report(&f, &params, 1, n, &Ladder::Constant(2.0), &params.s(0), 0.5, &sampler)?;
    for (k, est) in kb.kb1_fractions.iter().enumerate() {
        println!("k = {k}: fraction {:.4} ± {:.4}, exact lower {:?}", est.fraction, est.std_error, kb.kb1_exact_lower[k]);
    }
    println!("oscillation fraction {:.4}", kb.kb2_fraction.fraction);

    for row in tail_distribution(&f, &params, n, &[2.0, 4.0, 8.0], LevelChoice::Fixed(2), &sampler)? {
        println!(
            "t = {}: sampled {:.4} ± {:.4}, copy bound {:.4} (displayed count {:.4})",
            row.t, row.mc.fraction, row.mc.std_error, row.exact_bound, row.displayed_bound
        );
    }
    Ok(())
}
