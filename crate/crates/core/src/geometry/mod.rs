//! Ternary square systems: the gap sequence, copies and corridors, and exact
//! area arithmetic for rectangle unions.
//!
//! Sets translate as `τ_w X = {z - w : z ∈ X}`, so the level-`n` copy with
//! digit `j` is centered at `-w_j(n)`. The translate set is symmetric under
//! negation, so the union `E_n` does not depend on this choice, only the
//! labeling of individual copies does.

mod params;
pub mod rect;
mod square;

pub use params::{
    e_n_area_exact, normalized_scale, omega, to_f64, EpsilonSpec, PointClass, TernaryParams, TranslationIndex, OMEGA,
};
pub use rect::{relative_area, union_area, Rect};
pub use square::Square;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("depth must be at least 1")]
    InvalidDepth,
    #[error("epsilon_1 = {0} must be < 1")]
    Epsilon1TooLarge(f64),
    #[error("epsilon_{n} = {value} must be positive")]
    NonPositiveEpsilon { n: usize, value: f64 },
    #[error("epsilon_{} = {next} outside [epsilon_{n}/3, epsilon_{n}] = [{}, {current}]", n + 1, current / 3.0)]
    RatioViolation { n: usize, current: f64, next: f64 },
    #[error("level {requested} exceeds system depth {depth}")]
    DepthExceeded { requested: usize, depth: usize },
    #[error("9^({n}-{k}) copies is too many to enumerate")]
    TooManyCopies { k: usize, n: usize },
}
