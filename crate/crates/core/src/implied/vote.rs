use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::kernel_svm::{classify_value, Classification, DEFAULT_EPS_ON_PLANE};

use super::grid::HyperplaneGrid;

/// Majority-vote posterior for one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpliedEstimate {
    /// `(positive_votes + 1 + 0.5 on_plane_count) / (K + 2)`.
    pub value: f64,
    /// Positive classifications among the K trained models.
    pub positive_votes: usize,
    pub on_plane_count: usize,
    /// One classification per trained model, ascending level.
    pub per_level: Vec<Classification>,
    /// The sequence is not all-negative-then-all-positive (on-plane ignored).
    pub degenerate: bool,
}

impl ImpliedEstimate {
    /// Builds the estimate from per-level classifications of a K-model grid.
    pub fn from_classifications(per_level: Vec<Classification>) -> Self {
        let k = per_level.len();
        let positive_votes = per_level.iter().filter(|c| **c == Classification::Positive).count();
        let on_plane_count = per_level.iter().filter(|c| **c == Classification::OnPlane).count();
        // fictitious level-1 entry votes positive, level-0 negative
        let value = (positive_votes as f64 + 1.0 + 0.5 * on_plane_count as f64) / (k + 2) as f64;
        let degenerate = is_degenerate(&per_level);
        Self {
            value,
            positive_votes,
            on_plane_count,
            per_level,
            degenerate,
        }
    }

    pub fn negative_votes(&self) -> usize {
        self.per_level.len() - self.positive_votes - self.on_plane_count
    }
}

fn is_degenerate(seq: &[Classification]) -> bool {
    let mut seen_positive = false;
    for c in seq {
        match c {
            Classification::Positive => seen_positive = true,
            Classification::Negative if seen_positive => return true,
            _ => {}
        }
    }
    false
}

pub fn vote_estimate(grid: &HyperplaneGrid, x: &[f64], eps_on_plane: f64) -> Result<ImpliedEstimate> {
    if eps_on_plane < 0.0 {
        return Err(Error::invalid("eps_on_plane must be non-negative"));
    }
    let per_level = grid
        .trained_entries()
        .iter()
        .filter_map(|e| e.model.as_ref())
        .map(|m| m.decision_value(x).map(|f| classify_value(f, eps_on_plane)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ImpliedEstimate::from_classifications(per_level))
}

pub fn estimate_batch(grid: &HyperplaneGrid, test: &Dataset, eps_on_plane: f64) -> Result<Vec<ImpliedEstimate>> {
    test.rows().map(|x| vote_estimate(grid, x, eps_on_plane)).collect()
}

/// Sign-change structure of one point's classification sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SignChanges {
    pub id: usize,
    pub degenerate: bool,
    /// Adjacent level pairs `(lower, upper)` between which the class flips,
    /// counting the fictitious endpoints and skipping on-plane entries.
    pub brackets: Vec<(f64, f64)>,
}

impl SignChanges {
    pub fn first(&self) -> Option<(f64, f64)> {
        self.brackets.first().copied()
    }

    pub fn last(&self) -> Option<(f64, f64)> {
        self.brackets.last().copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyReport {
    pub degenerate_count: usize,
    /// Row positions (not ids) of degenerate points.
    pub degenerate_indices: Vec<usize>,
    pub points: Vec<SignChanges>,
}

/// Flip brackets of a classification sequence over `levels` (interior
/// levels only; the endpoints 0 and 1 are added here).
pub fn sign_change_brackets(levels: &[f64], per_level: &[Classification]) -> Vec<(f64, f64)> {
    let seq = std::iter::once((0.0, Classification::Negative))
        .chain(levels.iter().copied().zip(per_level.iter().copied()))
        .chain(std::iter::once((1.0, Classification::Positive)))
        .filter(|(_, c)| *c != Classification::OnPlane);
    let mut brackets = Vec::new();
    let mut prev: Option<(f64, Classification)> = None;
    for (level, c) in seq {
        if let Some((pl, pc)) = prev {
            if pc != c {
                brackets.push((pl, level));
            }
        }
        prev = Some((level, c));
    }
    brackets
}

pub fn degeneracy_report_from_estimates(
    grid: &HyperplaneGrid,
    ids: &[usize],
    estimates: &[ImpliedEstimate],
) -> DegeneracyReport {
    let levels: Vec<f64> = grid.trained_entries().iter().map(|e| e.level).collect();
    let points: Vec<SignChanges> = ids
        .iter()
        .zip(estimates)
        .map(|(id, est)| SignChanges {
            id: *id,
            degenerate: est.degenerate,
            brackets: sign_change_brackets(&levels, &est.per_level),
        })
        .collect();
    let degenerate_indices: Vec<usize> = points
        .iter()
        .enumerate()
        .filter(|(_, p)| p.degenerate)
        .map(|(i, _)| i)
        .collect();
    DegeneracyReport {
        degenerate_count: degenerate_indices.len(),
        degenerate_indices,
        points,
    }
}

pub fn degeneracy_report(grid: &HyperplaneGrid, test: &Dataset) -> Result<DegeneracyReport> {
    let estimates = estimate_batch(grid, test, DEFAULT_EPS_ON_PLANE)?;
    Ok(degeneracy_report_from_estimates(grid, test.ids(), &estimates))
}
