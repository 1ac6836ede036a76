//! The `∂̄` step that turns cut-off copies of `G_{n-1}` into an entire `G_n`:
//! cutoffs, the Cauchy transform, the weighted holomorphic projection, and
//! the level-by-level pipeline with its checks.

mod cauchy;
mod cutoff;
mod pipeline;
mod refine;
mod solve;

pub use cauchy::{cauchy_transform, cell_kernel, disk_indicator, disk_rect_area};
pub use cutoff::{c_chi, ramp, ramp_prime, CutoffFamily};
pub use pipeline::{assemble_g, build_g, Assembled, EntireApprox, LevelReport, PipelineOptions, PipelineOutput, Repr};
pub use refine::ArnoldiPoly;
pub use solve::{dbar_solve, DbarSolveResult, SolveMode, SolveOptions};

use crate::geometry::GeometryError;
use crate::subharmonic::SubharmonicError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DbarError {
    #[error("right-hand side touches the grid boundary")]
    UnsupportedRhs,
    #[error("e^(-u) underflows on {cells} cells; use the log-domain path")]
    WeightUnderflow { cells: usize },
    #[error("G_{level} covers half side {available} but {needed} is required")]
    CoverageGap { level: usize, needed: f64, available: f64 },
    #[error("Delta_{level} = exp({log_delta}) underflows; concordance cannot be asserted")]
    DepthInfeasible { level: usize, log_delta: f64 },
    #[error("depth must be at least 1")]
    InvalidDepth,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Subharmonic(#[from] SubharmonicError),
}
