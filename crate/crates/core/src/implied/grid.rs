use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::data::{Dataset, ScalingParams};
use crate::error::{Error, Result};
use crate::kernel_svm::{
    train_weighted_svm, train_with_gram, write_vector, GramMatrix, KernelSpec, PenaltyConfig, SolverOptions,
    SvmModel, DENSE_GRAM_LIMIT,
};
use crate::weighting::{z_plus_for_target_probability, EffectiveCounts, WeightPair};

const MANIFEST_MAGIC: &str = "implied-svm-grid 1";

/// How grid levels are turned into class weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridMode {
    /// Invert the general implied-level formula for the actual effective counts.
    Exact,
    /// Treat the effective counts as equal, so `z+` is the level and `z- = 1 - z+`.
    BalancedAssumption,
}

impl GridMode {
    /// Balanced assumption for a shared penalty, exact otherwise.
    pub fn default_for(base: PenaltyConfig) -> Self {
        if base.c_plus == base.c_minus {
            GridMode::BalancedAssumption
        } else {
            GridMode::Exact
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GridMode::Exact => "exact",
            GridMode::BalancedAssumption => "balanced",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(GridMode::Exact),
            "balanced" | "balanced-assumption" => Ok(GridMode::BalancedAssumption),
            other => Err(Error::invalid(format!("unknown grid mode {other:?} (exact|balanced)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridEntry {
    /// Implied posterior along this entry's separating surface.
    pub level: f64,
    /// `None` for the two fictitious endpoints.
    pub weights: Option<WeightPair>,
    pub model: Option<SvmModel>,
}

impl GridEntry {
    fn fictitious(level: f64) -> Self {
        Self {
            level,
            weights: None,
            model: None,
        }
    }

    pub fn is_fictitious(&self) -> bool {
        self.model.is_none()
    }
}

/// Reweighted models at levels `j / (K + 1)`, `j = 1..K`, bracketed by
/// fictitious entries at 0 and 1.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperplaneGrid {
    entries: Vec<GridEntry>,
    base: PenaltyConfig,
    base_counts: EffectiveCounts,
    kernel: KernelSpec,
    mode: GridMode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    /// Number of trained (non-fictitious) models.
    pub k: usize,
    pub mode: GridMode,
    pub solver: SolverOptions,
    /// Train entries on the rayon pool.
    pub parallel: bool,
}

impl GridConfig {
    pub fn new(k: usize, mode: GridMode) -> Self {
        Self {
            k,
            mode,
            solver: SolverOptions::default(),
            parallel: true,
        }
    }
}

/// Evenly spaced interior levels `j / (k + 1)`.
pub fn grid_levels(k: usize) -> Vec<f64> {
    (1..=k).map(|j| j as f64 / (k + 1) as f64).collect()
}

/// Weight pair for one level under `mode`. `counts` are the effective counts
/// the weights are derived from (equal halves of the budget for the
/// balanced assumption).
pub fn weights_for_level(level: f64, counts: &EffectiveCounts, mode: GridMode) -> Result<WeightPair> {
    let z_plus = match mode {
        GridMode::Exact => z_plus_for_target_probability(level, counts)?,
        GridMode::BalancedAssumption => level,
    };
    WeightPair::for_z_plus(z_plus, counts)
}

pub fn build_hyperplane_grid(
    train: &Dataset,
    kernel: KernelSpec,
    base: PenaltyConfig,
    config: &GridConfig,
) -> Result<HyperplaneGrid> {
    if config.k == 0 {
        return Err(Error::invalid("grid needs at least one trained model (K >= 1)"));
    }
    kernel.validate()?;
    base.validate()?;
    let (n_plus, n_minus) = train.class_counts();
    if n_plus == 0 || n_minus == 0 {
        return Err(Error::SingleClass { n_plus, n_minus });
    }
    let actual = EffectiveCounts::from_penalties(n_plus, n_minus, base)?;
    let base_counts = match config.mode {
        GridMode::Exact => actual,
        GridMode::BalancedAssumption => {
            let half = 0.5 * actual.total();
            EffectiveCounts::new(half, half)?
        }
    };

    let levels = grid_levels(config.k);
    let gram = if train.len() <= DENSE_GRAM_LIMIT {
        Some(GramMatrix::compute(train, kernel)?)
    } else {
        None
    };
    let train_level = |level: f64| -> Result<GridEntry> {
        let run = || -> Result<GridEntry> {
            let weights = weights_for_level(level, &base_counts, config.mode)?;
            let penalties = weights.apply(base)?;
            let (model, _) = match &gram {
                Some(g) => train_with_gram(train, g, penalties, config.solver)?,
                None => train_weighted_svm(train, kernel, penalties, config.solver.tol, config.solver.max_iter)?,
            };
            Ok(GridEntry {
                level,
                weights: Some(weights),
                model: Some(model),
            })
        };
        run().map_err(|e| Error::GridLevel {
            level,
            source: Box::new(e),
        })
    };
    let trained: Vec<Result<GridEntry>> = if config.parallel {
        levels.par_iter().map(|&p| train_level(p)).collect()
    } else {
        levels.iter().map(|&p| train_level(p)).collect()
    };

    let mut entries = Vec::with_capacity(config.k + 2);
    entries.push(GridEntry::fictitious(0.0));
    for entry in trained {
        entries.push(entry?);
    }
    entries.push(GridEntry::fictitious(1.0));
    Ok(HyperplaneGrid {
        entries,
        base,
        base_counts,
        kernel,
        mode: config.mode,
    })
}

impl HyperplaneGrid {
    /// Reassembles a grid from parts, checking the ordering invariants.
    pub fn from_entries(
        entries: Vec<GridEntry>,
        base: PenaltyConfig,
        base_counts: EffectiveCounts,
        kernel: KernelSpec,
        mode: GridMode,
    ) -> Result<Self> {
        let bad = |m: &str| Err(Error::invalid(format!("malformed grid: {m}")));
        if entries.len() < 3 {
            return bad("needs two fictitious entries and at least one model");
        }
        let last = entries.len() - 1;
        for (i, e) in entries.iter().enumerate() {
            let endpoint = i == 0 || i == last;
            if endpoint != e.is_fictitious() {
                return bad("fictitious entries must be exactly the endpoints");
            }
            if endpoint && e.level != if i == 0 { 0.0 } else { 1.0 } {
                return bad("fictitious entries must sit at levels 0 and 1");
            }
            if !endpoint && !(e.level > 0.0 && e.level < 1.0) {
                return bad("model levels must lie strictly inside (0, 1)");
            }
            if i > 0 && e.level <= entries[i - 1].level {
                return bad("levels must be strictly increasing");
            }
        }
        Ok(Self {
            entries,
            base,
            base_counts,
            kernel,
            mode,
        })
    }

    pub fn entries(&self) -> &[GridEntry] {
        &self.entries
    }

    /// Non-fictitious entries in ascending level order.
    pub fn trained_entries(&self) -> &[GridEntry] {
        &self.entries[1..self.entries.len() - 1]
    }

    /// Number of trained models, `K`.
    pub fn k(&self) -> usize {
        self.entries.len() - 2
    }

    pub fn base(&self) -> PenaltyConfig {
        self.base
    }

    pub fn base_counts(&self) -> EffectiveCounts {
        self.base_counts
    }

    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    pub fn mode(&self) -> GridMode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.trained_entries()[0].model.as_ref().map_or(0, SvmModel::dim)
    }

    /// Writes the manifest and one model file per trained entry into
    /// `<manifest stem>.models/` next to the manifest.
    pub fn save(&self, manifest: impl AsRef<Path>, scaling: Option<&ScalingParams>) -> Result<()> {
        let manifest = manifest.as_ref();
        let dir = manifest.parent().unwrap_or_else(|| Path::new("."));
        let stem = manifest
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "grid".into());
        let model_dir_name = format!("{stem}.models");
        let model_dir = dir.join(&model_dir_name);
        fs::create_dir_all(&model_dir).map_err(|e| Error::io(&model_dir, e))?;

        let mut out = String::new();
        let _ = writeln!(out, "{MANIFEST_MAGIC}");
        let _ = writeln!(out, "mode {}", self.mode.as_str());
        match self.kernel {
            KernelSpec::Linear => out.push_str("kernel linear\n"),
            KernelSpec::Rbf { gamma } => {
                let _ = writeln!(out, "kernel rbf {gamma}");
            }
        }
        let _ = writeln!(out, "base {} {}", self.base.c_plus, self.base.c_minus);
        let _ = writeln!(out, "counts {} {}", self.base_counts.e_plus(), self.base_counts.e_minus());
        let _ = writeln!(out, "k {}", self.k());
        if let Some(s) = scaling {
            write_vector(&mut out, "scaling_shift", &s.shift);
            write_vector(&mut out, "scaling_scale", &s.scale);
        }
        let width = (self.k() + 1).to_string().len().max(4);
        for (j, e) in self.entries.iter().enumerate() {
            match (&e.model, &e.weights) {
                (Some(model), Some(w)) => {
                    let rel = format!("{model_dir_name}/level_{j:0width$}.model");
                    model.save(dir.join(&rel), None)?;
                    let _ = writeln!(out, "entry {} {} {} {rel}", e.level, w.z_plus, w.z_minus);
                }
                _ => {
                    let _ = writeln!(out, "entry {} fictitious", e.level);
                }
            }
        }
        fs::write(manifest, out).map_err(|e| Error::io(manifest, e))
    }

    pub fn load(manifest: impl AsRef<Path>) -> Result<(Self, Option<ScalingParams>)> {
        let manifest = manifest.as_ref();
        let dir = manifest.parent().unwrap_or_else(|| Path::new("."));
        let text = fs::read_to_string(manifest).map_err(|e| Error::io(manifest, e))?;
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, l)) if l.trim() == MANIFEST_MAGIC => {}
            _ => return Err(Error::parse("grid:1", format!("expected header {MANIFEST_MAGIC:?}"))),
        }
        let (mut mode, mut kernel, mut base, mut counts, mut k) = (None, None, None, None, None);
        let (mut shift, mut scale) = (None, None);
        let mut entries = Vec::new();
        for (i, line) in lines {
            let at = format!("{}:{}", manifest.display(), i + 1);
            let tok: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<f64>().map_err(|e| Error::parse(&at, format!("{s:?}: {e}")));
            match tok.as_slice() {
                ["mode", m] => mode = Some(GridMode::parse(m)?),
                ["kernel", "linear"] => kernel = Some(KernelSpec::Linear),
                ["kernel", "rbf", g] => kernel = Some(KernelSpec::rbf(num(g)?)?),
                ["base", a, b] => base = Some(PenaltyConfig::new(num(a)?, num(b)?)?),
                ["counts", a, b] => counts = Some(EffectiveCounts::new(num(a)?, num(b)?)?),
                ["k", v] => k = Some(v.parse::<usize>().map_err(|e| Error::parse(&at, e.to_string()))?),
                ["scaling_shift", rest @ ..] => shift = Some(rest.iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?),
                ["scaling_scale", rest @ ..] => scale = Some(rest.iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?),
                ["entry", level, "fictitious"] => entries.push(GridEntry::fictitious(num(level)?)),
                ["entry", level, zp, zm, path] => {
                    let model_path: PathBuf = dir.join(path);
                    let (model, _) = SvmModel::load(&model_path)?;
                    entries.push(GridEntry {
                        level: num(level)?,
                        weights: Some(WeightPair {
                            z_plus: num(zp)?,
                            z_minus: num(zm)?,
                        }),
                        model: Some(model),
                    });
                }
                _ => return Err(Error::parse(&at, format!("unrecognised line {line:?}"))),
            }
        }
        let missing = |what: &str| Error::parse(manifest.display().to_string(), format!("missing {what}"));
        let grid = Self::from_entries(
            entries,
            base.ok_or_else(|| missing("base"))?,
            counts.ok_or_else(|| missing("counts"))?,
            kernel.ok_or_else(|| missing("kernel"))?,
            mode.ok_or_else(|| missing("mode"))?,
        )?;
        if let Some(k) = k {
            if k != grid.k() {
                return Err(Error::parse(
                    manifest.display().to_string(),
                    format!("header says k = {k} but {} models are listed", grid.k()),
                ));
            }
        }
        let scaling = match (shift, scale) {
            (None, None) => None,
            (Some(a), Some(b)) => Some(ScalingParams::new(a, b)?),
            _ => return Err(Error::parse(manifest.display().to_string(), "incomplete scaling")),
        };
        Ok((grid, scaling))
    }
}
