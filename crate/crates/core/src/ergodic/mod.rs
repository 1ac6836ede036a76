//! Averages over translates: Krylov–Bogolyubov fractions, oscillation,
//! tail distributions, the integral-geometry comparison and sublevel densities.

mod density;
mod kb;
mod sampler;
mod tails;

pub use density::{ig_check, local_density, sublevel_density, DensityField, IgReport};
pub use kb::{copy_complement_exact, kb_report, max_abs_on, oscillation_fraction, oscillation_on, KbReport, Ladder, MAX_NODES};
pub use sampler::{square_nodes, unit_point, Estimate, Scheme, TranslateSampler, SAMPLE_BUDGET};
pub use tails::{tail_distribution, LevelChoice, TailRow};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ErgodicError {
    #[error("{requested} samples exceed the budget of {budget}")]
    SamplerBudgetExceeded { requested: usize, budget: usize },
    #[error("sampler has no points")]
    NoSamples,
    #[error("level {k_max} is not below n = {n}")]
    InvalidLevels { k_max: usize, n: usize },
    #[error("ladder has {len} entries, level {k} requested")]
    LadderTooShort { k: usize, len: usize },
    #[error("{0}")]
    InvalidArgument(String),
}
