use std::fmt::Write;

use crate::calibrate::{fit_platt, normalize_scores, CalibrationReport, PlattParams, DEFAULT_BINS};
use crate::data::{apply_scaling, fit_scaling, Dataset, ScalingParams};
use crate::error::Result;
use crate::weighting::WeightPair;
use crate::implied::{
    build_hyperplane_grid, degeneracy_report_from_estimates, estimate_batch, DegeneracyReport, GridConfig, GridMode,
    HyperplaneGrid, ImpliedEstimate,
};
use crate::kernel_svm::{
    train_with_gram, GramMatrix, KernelSpec, PenaltyConfig, SolverDiagnostics, SolverOptions, SvmModel,
    DEFAULT_EPS_ON_PLANE,
};

/// Parameters of the end-to-end comparison run.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareSettings {
    pub kernel: KernelSpec,
    pub base: PenaltyConfig,
    pub k: usize,
    pub mode: GridMode,
    pub scale: bool,
    pub solver: SolverOptions,
    pub bins: usize,
    pub eps_on_plane: f64,
}

impl CompareSettings {
    /// German-credit setup: RBF gamma 0.001, C = 10, 201 grid entries.
    pub fn german() -> Self {
        Self {
            kernel: KernelSpec::Rbf { gamma: 0.001 },
            base: PenaltyConfig { c_plus: 10.0, c_minus: 10.0 },
            k: 199,
            mode: GridMode::BalancedAssumption,
            scale: false,
            solver: SolverOptions::default(),
            bins: DEFAULT_BINS,
            eps_on_plane: DEFAULT_EPS_ON_PLANE,
        }
    }

    /// 2D Gaussian setup: linear kernel, C = 20, nine hyperplanes.
    pub fn tutorial() -> Self {
        Self {
            kernel: KernelSpec::Linear,
            base: PenaltyConfig { c_plus: 20.0, c_minus: 20.0 },
            k: 9,
            mode: GridMode::BalancedAssumption,
            scale: false,
            solver: SolverOptions::default(),
            bins: DEFAULT_BINS,
            eps_on_plane: DEFAULT_EPS_ON_PLANE,
        }
    }

    /// Flat `key=value` form, loadable back through `--config`.
    pub fn to_config_text(&self) -> String {
        let mut out = String::new();
        match self.kernel {
            KernelSpec::Linear => out.push_str("kernel=linear\n"),
            KernelSpec::Rbf { gamma } => {
                let _ = writeln!(out, "kernel=rbf\ngamma={gamma}");
            }
        }
        let _ = writeln!(out, "c-plus={}", self.base.c_plus);
        let _ = writeln!(out, "c-minus={}", self.base.c_minus);
        let _ = writeln!(out, "k={}", self.k);
        let _ = writeln!(out, "mode={}", self.mode.as_str());
        let _ = writeln!(out, "scale={}", if self.scale { "minmax" } else { "none" });
        let _ = writeln!(out, "tol={}", self.solver.tol);
        let _ = writeln!(out, "max-iter={}", self.solver.max_iter);
        let _ = writeln!(out, "bins={}", self.bins);
        let _ = writeln!(out, "eps={}", self.eps_on_plane);
        out
    }
}

#[derive(Debug, Clone)]
pub struct CompareOutcome {
    pub scaling: Option<ScalingParams>,
    pub base_model: SvmModel,
    pub base_diagnostics: SolverDiagnostics,
    pub grid: HyperplaneGrid,
    pub platt: PlattParams,
    pub test_ids: Vec<usize>,
    pub test_labels01: Vec<f64>,
    pub raw_scores: Vec<f64>,
    pub normalized_scores: Vec<f64>,
    pub platt_estimates: Vec<f64>,
    pub implied: Vec<ImpliedEstimate>,
    pub degeneracy: DegeneracyReport,
    pub raw_report: CalibrationReport,
    pub platt_report: CalibrationReport,
    pub implied_report: CalibrationReport,
}

impl CompareOutcome {
    pub fn implied_values(&self) -> Vec<f64> {
        self.implied.iter().map(|e| e.value).collect()
    }

    /// `id,raw_score,normalized_score,platt_estimate,implied_estimate,iso_raw,iso_platt,iso_implied,label`
    pub fn points_csv(&self) -> String {
        let mut out =
            String::from("id,raw_score,normalized_score,platt_estimate,implied_estimate,iso_raw,iso_platt,iso_implied,label\n");
        for i in 0..self.test_ids.len() {
            let n = self.normalized_scores[i];
            let p = self.platt_estimates[i];
            let v = self.implied[i].value;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                self.test_ids[i],
                self.raw_scores[i],
                n,
                p,
                v,
                self.raw_report.isotonic.eval(n),
                self.platt_report.isotonic.eval(p),
                self.implied_report.isotonic.eval(v),
                self.test_labels01[i]
            );
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "test points           {}", self.test_ids.len());
        let _ = writeln!(out, "grid models           {} (+2 fictitious)", self.grid.k());
        let _ = writeln!(
            out,
            "degenerate points     {} of {}",
            self.degeneracy.degenerate_count,
            self.test_ids.len()
        );
        let _ = writeln!(out, "platt A, B            {:.6}, {:.6}", self.platt.a, self.platt.b);
        let _ = writeln!(out, "{:<12}{:>12}{:>10}", "method", "cal.score", "AUC");
        for r in [&self.raw_report, &self.platt_report, &self.implied_report] {
            let _ = writeln!(out, "{:<12}{:>12.4}{:>10.4}", r.method, r.calibration_score, r.auc());
        }
        out
    }
}

/// Base model, grid, implied estimates, Platt scaling fitted on the
/// training decision values, and calibration reports on the test set.
pub fn compare(train: &Dataset, test: &Dataset, settings: &CompareSettings) -> Result<CompareOutcome> {
    let (train, test, scaling) = if settings.scale {
        let s = fit_scaling(train)?;
        (apply_scaling(train, &s)?, apply_scaling(test, &s)?, Some(s))
    } else {
        (train.clone(), test.clone(), None)
    };

    // the reference model is the z+ = z- = 0.5 member of the grid family
    let reference = WeightPair {
        z_plus: 0.5,
        z_minus: 0.5,
    }
    .apply(settings.base)?;
    let gram = GramMatrix::compute(&train, settings.kernel)?;
    let (base_model, base_diagnostics) = train_with_gram(&train, &gram, reference, settings.solver)?;
    drop(gram);

    let mut grid_config = GridConfig::new(settings.k, settings.mode);
    grid_config.solver = settings.solver;
    let grid = build_hyperplane_grid(&train, settings.kernel, settings.base, &grid_config)?;

    let train_scores = train
        .rows()
        .map(|x| base_model.decision_value(x))
        .collect::<Result<Vec<_>>>()?;
    let platt = fit_platt(&train_scores, train.labels())?;

    let raw_scores = test
        .rows()
        .map(|x| base_model.decision_value(x))
        .collect::<Result<Vec<_>>>()?;
    let normalized_scores = normalize_scores(&raw_scores);
    let platt_estimates: Vec<f64> = raw_scores.iter().map(|f| platt.apply(*f)).collect();
    let implied = estimate_batch(&grid, &test, settings.eps_on_plane)?;
    let implied_values: Vec<f64> = implied.iter().map(|e| e.value).collect();
    let degeneracy = degeneracy_report_from_estimates(&grid, test.ids(), &implied);

    let labels01 = test.indicators();
    let raw_report = CalibrationReport::evaluate("raw", &normalized_scores, &labels01, settings.bins)?;
    let platt_report = CalibrationReport::evaluate("platt", &platt_estimates, &labels01, settings.bins)?;
    let implied_report = CalibrationReport::evaluate("implied", &implied_values, &labels01, settings.bins)?;

    Ok(CompareOutcome {
        scaling,
        base_model,
        base_diagnostics,
        grid,
        platt,
        test_ids: test.ids().to_vec(),
        test_labels01: labels01,
        raw_scores,
        normalized_scores,
        platt_estimates,
        implied,
        degeneracy,
        raw_report,
        platt_report,
        implied_report,
    })
}

/// One row per point: coordinates, per-level classification symbols,
/// vote counts and the estimate.
pub fn vote_table(grid: &HyperplaneGrid, points: &Dataset, estimates: &[ImpliedEstimate]) -> String {
    let mut out = String::new();
    let levels: Vec<String> = grid
        .trained_entries()
        .iter()
        .map(|e| format!("{:.3}", e.level))
        .collect();
    let _ = writeln!(out, "id,label,{},votes,value,degenerate", levels.join(","));
    for (i, est) in estimates.iter().enumerate() {
        let symbols: Vec<&str> = est.per_level.iter().map(|c| c.symbol()).collect();
        let _ = writeln!(
            out,
            "{},{},{},{}/{},{:.4},{}",
            points.ids()[i],
            points.label(i).sign(),
            symbols.join(","),
            est.positive_votes,
            est.per_level.len(),
            est.value,
            est.degenerate
        );
    }
    out
}
