//! Computational toolkit for entire functions of nearly minimal growth that
//! live outside a ternary system of squares.
//!
//! The crate builds the square systems exactly, evaluates the glued
//! subharmonic functions `u_n` and their majorants, runs the growth
//! certificates on sampled fields, solves the `∂̄` problem that turns the
//! subharmonic picture into an entire function, samples Krylov–Bogolyubov
//! orbit averages, and computes Ahlfors–Shimizu characteristics.
//!
//! Every check here is a finite-range statement: quantities that grow doubly
//! exponentially are carried as logarithms, and everything that is measured
//! is reported together with its tolerance.

pub mod cli;
pub mod dbar;
pub mod ergodic;
pub mod field;
pub mod geometry;
pub mod growth;
pub mod logspace;
pub mod nevanlinna;
pub mod quadrature;
pub mod subharmonic;

pub use num_complex::Complex64;
