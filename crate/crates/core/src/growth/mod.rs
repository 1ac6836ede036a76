//! Growth certificates on sampled fields: γ-good unit squares and `β(Q)`,
//! the disk chain that turns zero-set density into exponential growth, the
//! three-case square selection, and the discrete sub-mean-value check.

mod adi;
mod goodness;
mod selection;
mod submean;

pub use adi::{adi_certify, adi_chain, mean_value_step, AdiChain, AdiStep, MeanValueStep};
pub use goodness::{goodness_stats, GoodnessField, GoodnessSummary};
pub use selection::{
    default_b, k_for_side, levsasha_select, lower_bound_report, LowerBoundReport, SelectionChain, SelectionStep,
    SubSquare,
};
pub use submean::{submean_check, SubmeanResult, SUBMEAN_C};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrowthError {
    #[error("gamma must lie in (0,1), got {0}")]
    InvalidGamma(f64),
    #[error("field square must have integer corners and a whole number of cells per unit")]
    NonIntegerSquare,
    #[error("beta(Q_0) = 0: no good unit squares to select from")]
    ZeroBeta,
    #[error("B = {b}, theta = {theta} violates B > 1, 0 < theta < 1, B*theta < 1/2")]
    ConstraintViolation { b: f64, theta: f64 },
    #[error("{exceptional} exceptional unit squares exceed alpha*L = {allowed}")]
    HypothesisFailed { exceptional: u64, allowed: f64 },
    #[error("maximizer for M_u({j}) sits at radius {radius}, inside the circle by more than two cells")]
    GridTooCoarse { j: usize, radius: f64 },
    #[error("disk radius p = {0} must be an integer >= 2 with pi p^2 > gamma")]
    InvalidDiskRadius(usize),
    #[error("square side {0} is too small for this procedure")]
    TooSmall(usize),
    #[error("chain has {steps} steps, expected k = {k}")]
    IncompleteChain { steps: usize, k: usize },
    #[error("disk does not fit inside the field")]
    DiskOutOfRange,
    #[error("radius {r} is below two grid cells ({h} each)")]
    RadiusTooSmall { r: f64, h: f64 },
}
