//! Class-posterior estimation for binary soft-margin SVMs.
//!
//! A grid of class-reweighted SVMs, each trained with the same effective
//! point budget, is evaluated at a query point; the share of grid members
//! voting positive is the implied posterior probability. The [`calibrate`]
//! module compares those estimates against raw scores and Platt scaling.

pub mod calibrate;
pub mod cli;
pub mod data;
pub mod error;
pub mod implied;
pub mod kernel_svm;
pub mod weighting;

pub use error::{Error, Result};
