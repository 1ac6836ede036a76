//! Build `G_1 = z` and `G_2` on a 256² grid at `B = 3` and print the level reports.

use std::time::Instant;
use ternlab::dbar::{build_g, PipelineOptions, SolveMode, SolveOptions};
use ternlab::geometry::{EpsilonSpec, TernaryParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let degree: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(SolveOptions::default().degree);
    let params = TernaryParams::build(EpsilonSpec::Geometric, 3)?;
    let opts = PipelineOptions {
        solve: SolveOptions { mode: SolveMode::WeightedRefine, degree, ..Default::default() },
        ..Default::default()
    };
    let start = Instant::now();
    let out = build_g(&params, 3.0, 2, 256, &opts)?;
    for r in &out.reports {
        println!("{}", serde_json::to_string_pretty(r)?);
    }
    println!("elapsed {:.2?}", start.elapsed());
    Ok(())
}
