//! Datasets: CSV ingestion, consecutive splitting, synthetic 2D Gaussian
//! classes and min-max feature scaling.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Binary class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    /// `+1.0` or `-1.0`.
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    /// `1.0` for positive, `0.0` for negative.
    #[inline]
    pub fn indicator(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => 0.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }

    pub fn from_sign(value: i64) -> Option<Self> {
        match value {
            1 => Some(Label::Positive),
            -1 => Some(Label::Negative),
            _ => None,
        }
    }
}

/// Dense feature matrix (row-major) with one label and one record id per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    dim: usize,
    labels: Vec<Label>,
    ids: Vec<usize>,
}

impl Dataset {
    pub fn new(features: Vec<f64>, dim: usize, labels: Vec<Label>, ids: Vec<usize>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidData("feature dimension must be at least 1".into()));
        }
        if features.len() != dim * labels.len() {
            return Err(Error::InvalidData(format!(
                "{} feature values cannot form {} rows of dimension {}",
                features.len(),
                labels.len(),
                dim
            )));
        }
        if ids.len() != labels.len() {
            return Err(Error::InvalidData(format!(
                "{} ids for {} rows",
                ids.len(),
                labels.len()
            )));
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!(
                "non-finite feature value in row {} column {}",
                pos / dim,
                pos % dim
            )));
        }
        Ok(Self {
            features,
            dim,
            labels,
            ids,
        })
    }

    /// Builds a dataset from rows; ids are the 0-based row positions.
    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<Label>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
            return Err(Error::InvalidData(format!(
                "row {i} has {} features, expected {dim}",
                r.len()
            )));
        }
        let ids = (0..rows.len()).collect();
        Self::new(rows.concat(), dim, labels, ids)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.features.chunks_exact(self.dim)
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    #[inline]
    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    /// `(n+, n-)`.
    pub fn class_counts(&self) -> (usize, usize) {
        let n_plus = self.labels.iter().filter(|l| **l == Label::Positive).count();
        (n_plus, self.len() - n_plus)
    }

    /// Labels as `0/1` indicators, in row order.
    pub fn indicators(&self) -> Vec<f64> {
        self.labels.iter().map(|l| l.indicator()).collect()
    }

    /// Same rows with every label negated.
    pub fn with_flipped_labels(&self) -> Self {
        Self {
            labels: self.labels.iter().map(|l| l.flipped()).collect(),
            ..self.clone()
        }
    }

    /// Every row repeated `copies` times in place (row order `0,0,..,1,1,..`).
    pub fn with_repeated_rows(&self, copies: usize) -> Self {
        let mut features = Vec::with_capacity(self.features.len() * copies);
        let mut labels = Vec::with_capacity(self.len() * copies);
        let mut ids = Vec::with_capacity(self.len() * copies);
        for i in 0..self.len() {
            for _ in 0..copies {
                features.extend_from_slice(self.row(i));
                labels.push(self.labels[i]);
                ids.push(self.ids[i]);
            }
        }
        Self {
            features,
            dim: self.dim,
            labels,
            ids,
        }
    }

    fn slice(&self, range: std::ops::Range<usize>) -> Self {
        Self {
            features: self.features[range.start * self.dim..range.end * self.dim].to_vec(),
            dim: self.dim,
            labels: self.labels[range.clone()].to_vec(),
            ids: self.ids[range].to_vec(),
        }
    }

    /// Concatenates two datasets of equal dimension, preserving order.
    pub fn concat(&self, other: &Dataset) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: other.dim,
            });
        }
        let mut out = self.clone();
        out.features.extend_from_slice(&other.features);
        out.labels.extend_from_slice(&other.labels);
        out.ids.extend_from_slice(&other.ids);
        Ok(out)
    }

    /// CSV with a `label,x1,..,xd` header; labels written as `1` / `-1`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("label");
        for j in 1..=self.dim {
            let _ = write!(out, ",x{j}");
        }
        out.push('\n');
        for (i, row) in self.rows().enumerate() {
            out.push_str(match self.labels[i] {
                Label::Positive => "1",
                Label::Negative => "-1",
            });
            for v in row {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }
}

fn split_cells(line: &str) -> Vec<&str> {
    if line.contains(',') {
        line.split(',').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    }
}

/// Parses CSV text (comma- or whitespace-separated, optional header).
///
/// The first row is a header iff none of its cells parses as a number.
/// `label_column` selects the label; `positive_token` maps to +1 and the
/// single other token present maps to -1.
pub fn parse_csv(text: &str, source: &str, label_column: usize, positive_token: &str) -> Result<Dataset> {
    let mut rows: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, split_cells(l)))
        .collect();
    if let Some((_, first)) = rows.first() {
        if first.iter().all(|c| c.parse::<f64>().is_err()) {
            rows.remove(0);
        }
    }
    if rows.is_empty() {
        return Err(Error::InvalidData(format!("{source}: no data rows")));
    }
    let width = rows[0].1.len();
    if width < 2 {
        return Err(Error::parse(
            format!("{source}:{}", rows[0].0),
            "need a label column and at least one feature column",
        ));
    }
    if label_column >= width {
        return Err(Error::invalid(format!(
            "label column {label_column} out of range for {width} columns"
        )));
    }

    let tokens: BTreeSet<&str> = rows.iter().map(|(_, r)| r.get(label_column).copied().unwrap_or("")).collect();
    if tokens.len() != 2 {
        return Err(Error::InvalidData(format!(
            "{source}: label column must hold exactly two distinct tokens, found {}: {:?}",
            tokens.len(),
            tokens.iter().take(5).collect::<Vec<_>>()
        )));
    }
    if !tokens.contains(positive_token) {
        return Err(Error::InvalidData(format!(
            "{source}: positive label {positive_token:?} not among {tokens:?}"
        )));
    }

    let dim = width - 1;
    let mut features = Vec::with_capacity(rows.len() * dim);
    let mut labels = Vec::with_capacity(rows.len());
    for (line_no, cells) in &rows {
        if cells.len() != width {
            return Err(Error::parse(
                format!("{source}:{line_no}"),
                format!("expected {width} columns, found {}", cells.len()),
            ));
        }
        for (j, cell) in cells.iter().enumerate() {
            if j == label_column {
                labels.push(if *cell == positive_token {
                    Label::Positive
                } else {
                    Label::Negative
                });
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| {
                Error::parse(
                    format!("{source}:{line_no}"),
                    format!("non-numeric feature value {cell:?} in column {j}"),
                )
            })?;
            features.push(v);
        }
    }
    let ids = (0..labels.len()).collect();
    Dataset::new(features, dim, labels, ids)
}

pub fn load_csv(path: impl AsRef<Path>, label_column: usize, positive_token: &str) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text, &path.display().to_string(), label_column, positive_token)
}

/// First `n_train` rows become the training set, the rest the test set.
pub fn split_consecutive(ds: &Dataset, n_train: usize) -> Result<(Dataset, Dataset)> {
    if n_train == 0 || n_train >= ds.len() {
        return Err(Error::invalid(format!(
            "training size {n_train} must lie strictly between 0 and {}",
            ds.len()
        )));
    }
    Ok((ds.slice(0..n_train), ds.slice(n_train..ds.len())))
}

/// Two bivariate Gaussian classes.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSpec {
    pub mean_plus: [f64; 2],
    pub cov_plus: [[f64; 2]; 2],
    pub mean_minus: [f64; 2],
    pub cov_minus: [[f64; 2]; 2],
    pub n_plus: usize,
    pub n_minus: usize,
    pub seed: u64,
}

impl GaussianSpec {
    /// The 20-point setup used by the `tutorial` preset.
    pub fn tutorial(seed: u64) -> Self {
        Self {
            mean_plus: [1.0, 1.0],
            cov_plus: [[1.0, 0.6], [0.6, 1.2]],
            mean_minus: [-1.0, -0.5],
            cov_minus: [[1.5, -0.4], [-0.4, 0.6]],
            n_plus: 10,
            n_minus: 10,
            seed,
        }
    }
}

/// Lower Cholesky factor of a symmetric positive-definite 2x2 matrix.
fn cholesky2(c: &[[f64; 2]; 2], name: &str) -> Result<[[f64; 2]; 2]> {
    let scale = c[0][0].abs().max(c[1][1].abs()).max(1.0);
    if c.iter().flatten().any(|v| !v.is_finite()) || (c[0][1] - c[1][0]).abs() > 1e-12 * scale {
        return Err(Error::invalid(format!("{name} must be finite and symmetric")));
    }
    let det = c[0][0] * c[1][1] - c[0][1] * c[1][0];
    if c[0][0] <= 0.0 || det <= 0.0 {
        return Err(Error::invalid(format!("{name} is not positive definite")));
    }
    let l00 = c[0][0].sqrt();
    let l10 = c[1][0] / l00;
    let l11 = (c[1][1] - l10 * l10).sqrt();
    Ok([[l00, 0.0], [l10, l11]])
}

/// Pair of independent standard normals by Box-Muller.
fn box_muller(rng: &mut ChaCha8Rng) -> (f64, f64) {
    // u1 in (0, 1] keeps the logarithm finite.
    let u1 = 1.0 - rng.random::<f64>();
    let u2 = rng.random::<f64>();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = std::f64::consts::TAU * u2;
    (r * theta.cos(), r * theta.sin())
}

/// Samples `n_plus` positive rows followed by `n_minus` negative rows.
pub fn generate_gaussian_2d(spec: &GaussianSpec) -> Result<Dataset> {
    let l_plus = cholesky2(&spec.cov_plus, "positive covariance")?;
    let l_minus = cholesky2(&spec.cov_minus, "negative covariance")?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n_plus + spec.n_minus;
    let mut features = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(n);
    let classes = [
        (Label::Positive, spec.n_plus, spec.mean_plus, l_plus),
        (Label::Negative, spec.n_minus, spec.mean_minus, l_minus),
    ];
    for (label, count, mean, l) in classes {
        for _ in 0..count {
            let (z0, z1) = box_muller(&mut rng);
            features.push(mean[0] + l[0][0] * z0);
            features.push(mean[1] + l[1][0] * z0 + l[1][1] * z1);
            labels.push(label);
        }
    }
    let ids = (0..n).collect();
    Dataset::new(features, 2, labels, ids)
}

/// Per-feature affine map `x -> (x - shift) / scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingParams {
    pub shift: Vec<f64>,
    pub scale: Vec<f64>,
}

impl ScalingParams {
    pub fn new(shift: Vec<f64>, scale: Vec<f64>) -> Result<Self> {
        if shift.len() != scale.len() {
            return Err(Error::invalid("scaling shift and scale lengths differ"));
        }
        if shift.iter().any(|v| !v.is_finite()) || scale.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(Error::invalid("scaling shifts must be finite and scales positive"));
        }
        Ok(Self { shift, scale })
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn apply_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        Ok(x.iter()
            .zip(self.shift.iter().zip(&self.scale))
            .map(|(v, (s, k))| (v - s) / k)
            .collect())
    }

    /// `shift=a,b,..` and `scale=a,b,..` lines.
    pub fn to_text(&self) -> String {
        let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        format!("shift={}\nscale={}\n", join(&self.shift), join(&self.scale))
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut shift = None;
        let mut scale = None;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(format!("scaling:{}", i + 1), "expected key=value"))?;
            let values = value
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::parse(format!("scaling:{}", i + 1), e.to_string()))?;
            match key.trim() {
                "shift" => shift = Some(values),
                "scale" => scale = Some(values),
                other => return Err(Error::parse(format!("scaling:{}", i + 1), format!("unknown key {other:?}"))),
            }
        }
        let (shift, scale) = match (shift, scale) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::parse("scaling", "both shift and scale are required")),
        };
        Self::new(shift, scale)
    }
}

/// Min-max parameters per feature; constant features get scale 1.
pub fn fit_scaling(ds: &Dataset) -> Result<ScalingParams> {
    if ds.is_empty() {
        return Err(Error::InvalidData("cannot fit scaling on an empty dataset".into()));
    }
    let d = ds.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for row in ds.rows() {
        for (j, v) in row.iter().enumerate() {
            lo[j] = lo[j].min(*v);
            hi[j] = hi[j].max(*v);
        }
    }
    let scale = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| if b > a { b - a } else { 1.0 })
        .collect();
    Ok(ScalingParams { shift: lo, scale })
}

pub fn apply_scaling(ds: &Dataset, params: &ScalingParams) -> Result<Dataset> {
    if params.dim() != ds.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            actual: ds.dim(),
        });
    }
    let mut features = Vec::with_capacity(ds.features.len());
    for row in ds.rows() {
        features.extend(params.apply_point(row)?);
    }
    Dataset::new(features, ds.dim, ds.labels.clone(), ds.ids.clone())
}
