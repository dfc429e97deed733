//! Calibration diagnostics: Platt scaling, isotonic regression, reliability
//! bins, calibration scores and ROC analysis.

mod isotonic;
mod platt;
mod reliability;
mod roc;
pub mod svg;

pub use isotonic::{fit_isotonic, StepFunction};
pub use platt::{apply_platt, fit_platt, platt_targets, PlattParams};
pub use reliability::{bin_index, bin_reliability, calibration_score, normalize_scores, BinPoint};
pub use roc::{roc_and_auc, RocCurve};

use crate::error::Result;

pub const DEFAULT_BINS: usize = 10;

/// Everything computed for one family of probability estimates over a
/// labelled evaluation set.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReport {
    pub method: String,
    pub calibration_score: f64,
    pub bins: Vec<BinPoint>,
    pub isotonic: StepFunction,
    pub roc: RocCurve,
}

impl CalibrationReport {
    /// Fits the isotonic map on `(estimates, labels01)` and scores the
    /// estimates against it.
    pub fn evaluate(method: &str, estimates: &[f64], labels01: &[f64], n_bins: usize) -> Result<Self> {
        let isotonic = fit_isotonic(estimates, labels01)?;
        let calibration_score = calibration_score(estimates, &isotonic)?;
        let bins = bin_reliability(estimates, labels01, n_bins)?;
        let roc = roc_and_auc(estimates, labels01)?;
        Ok(Self {
            method: method.to_string(),
            calibration_score,
            bins,
            isotonic,
            roc,
        })
    }

    pub fn auc(&self) -> f64 {
        self.roc.auc
    }

    /// `lower,upper,center,count,mean_estimate,positive_rate`; empty bins
    /// leave the last two fields blank.
    pub fn bins_csv(&self) -> String {
        let mut out = String::from("lower,upper,center,count,mean_estimate,positive_rate\n");
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for b in &self.bins {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                b.lower,
                b.upper,
                b.center(),
                b.count,
                opt(b.mean_estimate),
                opt(b.positive_rate)
            ));
        }
        out
    }

    pub fn roc_csv(&self) -> String {
        let mut out = String::from("fpr,tpr\n");
        for (x, y) in &self.roc.points {
            out.push_str(&format!("{x},{y}\n"));
        }
        out
    }
}
