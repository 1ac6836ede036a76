//! The glued subharmonic functions `u_n`: the strip function `h`, the corridor
//! envelopes `v_n`, the majorant table, the property checks and the loglog mean.

mod envelope;
mod evaluator;
mod loglog;
mod majorant;
mod verify;

pub use envelope::{h_eval, ln_cosh, VEnvelope};
pub use evaluator::SubharmonicEvaluator;
pub use loglog::{loglog_integral, LoglogEstimate, LoglogOptions};
pub use majorant::MajorantTable;
pub use verify::{copy_centers_agree, corridor_v_min, gluing_margin, verify_sh, CorridorMin, ShReport};

use crate::geometry::GeometryError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SubharmonicError {
    #[error("level {requested} exceeds available depth {depth}")]
    DepthExceeded { requested: usize, depth: usize },
    #[error("u_{level} = exp({log_value}) does not fit in f64; use the log domain")]
    Overflow { level: usize, log_value: f64 },
    #[error("grid resolution {0} is below the minimum of 64 per side")]
    GridTooSmall(usize),
    #[error("quadrature did not converge: last refinement changed the value {value} by {achieved}")]
    QuadratureFailure { achieved: f64, value: f64 },
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
