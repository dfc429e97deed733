use crate::error::{Error, Result};

use super::isotonic::StepFunction;
use super::roc::check_indicators;

/// One reliability-diagram bin. Empty bins carry `count == 0` and no means.
#[derive(Debug, Clone, PartialEq)]
pub struct BinPoint {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
    pub mean_estimate: Option<f64>,
    pub positive_rate: Option<f64>,
}

impl BinPoint {
    pub fn center(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }
}

/// Bin index for `x` among `n_bins` equal-width bins on `[0, 1]`; the top
/// bin is closed on the right and out-of-range values are clamped.
pub fn bin_index(x: f64, n_bins: usize) -> usize {
    if x.is_nan() || x <= 0.0 {
        return 0;
    }
    ((x * n_bins as f64).floor() as usize).min(n_bins - 1)
}

pub fn bin_reliability(estimates: &[f64], labels01: &[f64], n_bins: usize) -> Result<Vec<BinPoint>> {
    if n_bins == 0 {
        return Err(Error::invalid("need at least one bin"));
    }
    if estimates.len() != labels01.len() {
        return Err(Error::DimensionMismatch {
            expected: labels01.len(),
            actual: estimates.len(),
        });
    }
    check_indicators(labels01)?;
    let mut sums = vec![(0usize, 0.0, 0.0); n_bins];
    for (e, l) in estimates.iter().zip(labels01) {
        let s = &mut sums[bin_index(*e, n_bins)];
        s.0 += 1;
        s.1 += e;
        s.2 += l;
    }
    let width = 1.0 / n_bins as f64;
    Ok(sums
        .into_iter()
        .enumerate()
        .map(|(k, (count, se, sl))| BinPoint {
            lower: k as f64 * width,
            upper: if k + 1 == n_bins { 1.0 } else { (k + 1) as f64 * width },
            count,
            mean_estimate: (count > 0).then(|| se / count as f64),
            positive_rate: (count > 0).then(|| sl / count as f64),
        })
        .collect())
}

/// Mean `|estimate - iso(estimate)|`.
pub fn calibration_score(estimates: &[f64], iso: &StepFunction) -> Result<f64> {
    if estimates.is_empty() {
        return Err(Error::invalid("calibration score of an empty set"));
    }
    if iso.is_empty() {
        return Err(Error::invalid("empty step function"));
    }
    let total: f64 = estimates.iter().map(|e| (e - iso.eval(*e)).abs()).sum();
    Ok(total / estimates.len() as f64)
}

/// Min-max map onto `[0, 1]`; constant input maps to 0.5.
pub fn normalize_scores(scores: &[f64]) -> Vec<f64> {
    let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi.is_nan() || hi <= lo {
        return vec![0.5; scores.len()];
    }
    scores.iter().map(|s| (s - lo) / (hi - lo)).collect()
}
