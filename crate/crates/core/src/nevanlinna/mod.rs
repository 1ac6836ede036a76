//! Spherical derivative, Ahlfors–Shimizu characteristic, the Weierstrass
//! `℘` reference function and argument-principle coverage checks.

mod compare;
mod handle;
mod profile;
mod weierstrass;
mod winding;

use num_complex::Complex64;
use thiserror::Error;

pub use compare::{compare_t_log_m, log_max_modulus, TLogMComparison};
pub use handle::{chordal, ExtComplex, MeromorphicHandle};
pub use profile::{tfr_profile, NevanlinnaProfile, ProfileOptions};
pub use weierstrass::{Weierstrass, WpParts};
pub use winding::{
    recurrence_coverage, winding_number, Circle, CoverageOptions, CoverageReport, SphericalDisk, WindingReport,
};

#[derive(Debug, Error)]
pub enum NevanlinnaError {
    #[error("evaluating {function} at {z} failed: {reason}")]
    EvaluationFailure { function: String, z: Complex64, reason: String },
    #[error("quadrature error {error:.3e} at r = {r} exceeds tolerance for scale {scale:.3e}")]
    QuadratureFailure { r: f64, error: f64, scale: f64 },
    #[error("curve passes within {min_distance:.3e} of the point")]
    CurveThroughPoint { min_distance: f64 },
    #[error("spherical gap {delta:.3e} between the disk and the boundary image is below resolution")]
    GapTooSmall { delta: f64 },
    #[error("perturbation {perturbation:.3e} < delta/2 = {:.3e} but coverage failed", .delta / 2.0)]
    GuaranteeViolated { perturbation: f64, delta: f64 },
    #[error("{0}")]
    InvalidArgument(String),
}
