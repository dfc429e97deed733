//! The hyperplane grid and the majority-vote implied posterior.
//!
//! Each trained entry is an SVM fit under class weights chosen so that its
//! separating surface carries a known implied posterior level. A point's
//! estimate is the share of entries (plus one always-positive and one
//! always-negative fictitious entry) that classify it as positive. Entries
//! need not be parallel, so the per-level classifications can flip more
//! than once; such points are flagged as degenerate.

mod grid;
mod vote;

pub use grid::{
    build_hyperplane_grid, grid_levels, weights_for_level, GridConfig, GridEntry, GridMode, HyperplaneGrid,
};
pub use vote::{
    degeneracy_report, degeneracy_report_from_estimates, estimate_batch, sign_change_brackets, vote_estimate,
    DegeneracyReport, ImpliedEstimate, SignChanges,
};
