//! Generation, validation and application of coefficient sets that evaluate a
//! degree-`m` matrix polynomial with one matrix product fewer than the
//! Paterson-Stockmeyer method.
//!
//! The pipeline is: pick the block size ([`scheme::select_params`]), solve the
//! coefficient-matching system in extended precision ([`solver`]), rank the
//! real solution sets by their reconstruction error after rounding to the
//! target format ([`stability`]), and evaluate with exact product accounting
//! ([`matrix::evaluate_scheme`]).

pub mod apps;
pub mod cli;
pub mod error;
pub mod extprec;
pub mod matrix;
pub mod pipeline;
pub mod psm;
pub mod report;
pub mod scheme;
pub mod solver;
pub mod stability;

pub use error::{Error, Result};
pub use extprec::{BigComplex, BigReal, PrecisionTarget, Real, TargetKind};
