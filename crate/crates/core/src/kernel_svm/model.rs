use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::data::{Dataset, Label, ScalingParams};
use crate::error::{Error, Result};

use super::kernel::KernelSpec;

/// Default half-width of the band around `f(x) = 0` treated as "on the plane".
pub const DEFAULT_EPS_ON_PLANE: f64 = 1e-9;

const MODEL_MAGIC: &str = "implied-svm-model 1";

/// Per-class penalties actually applied to the slack terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyConfig {
    pub c_plus: f64,
    pub c_minus: f64,
}

impl PenaltyConfig {
    pub fn new(c_plus: f64, c_minus: f64) -> Result<Self> {
        let p = Self { c_plus, c_minus };
        p.validate()?;
        Ok(p)
    }

    pub fn symmetric(c: f64) -> Result<Self> {
        Self::new(c, c)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c_plus", self.c_plus), ("c_minus", self.c_minus)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn for_label(&self, label: Label) -> f64 {
        match label {
            Label::Positive => self.c_plus,
            Label::Negative => self.c_minus,
        }
    }

    pub fn swapped(&self) -> Self {
        Self {
            c_plus: self.c_minus,
            c_minus: self.c_plus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Positive,
    Negative,
    OnPlane,
}

impl Classification {
    /// Vote weight: 1 for positive, 0 for negative, 0.5 on the plane.
    pub fn vote(self) -> f64 {
        match self {
            Classification::Positive => 1.0,
            Classification::Negative => 0.0,
            Classification::OnPlane => 0.5,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Classification::Positive => "+",
            Classification::Negative => "-",
            Classification::OnPlane => "0",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportVector {
    /// Row index in the training set.
    pub index: usize,
    pub label: Label,
    pub alpha: f64,
    pub x: Vec<f64>,
}

/// A trained soft-margin SVM: `f(x) = sum_i alpha_i y_i K(x_i, x) + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    kernel: KernelSpec,
    penalties: PenaltyConfig,
    bias: f64,
    dim: usize,
    dual_coeffs: Vec<f64>,
    support: Vec<SupportVector>,
}

impl SvmModel {
    /// Assembles a model from dual coefficients over `train`. Rows with a
    /// nonzero coefficient become support vectors.
    pub fn from_parts(
        train: &Dataset,
        kernel: KernelSpec,
        penalties: PenaltyConfig,
        dual_coeffs: Vec<f64>,
        bias: f64,
    ) -> Result<Self> {
        if dual_coeffs.len() != train.len() {
            return Err(Error::DimensionMismatch {
                expected: train.len(),
                actual: dual_coeffs.len(),
            });
        }
        let support = dual_coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != 0.0)
            .map(|(i, a)| SupportVector {
                index: i,
                label: train.label(i),
                alpha: *a,
                x: train.row(i).to_vec(),
            })
            .collect();
        Ok(Self {
            kernel,
            penalties,
            bias,
            dim: train.dim(),
            dual_coeffs,
            support,
        })
    }

    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    pub fn penalties(&self) -> PenaltyConfig {
        self.penalties
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// One coefficient per training row, zero for non-support vectors.
    pub fn dual_coeffs(&self) -> &[f64] {
        &self.dual_coeffs
    }

    pub fn support_vectors(&self) -> &[SupportVector] {
        &self.support
    }

    pub fn support_indices(&self) -> Vec<usize> {
        self.support.iter().map(|sv| sv.index).collect()
    }

    /// Explicit normal vector, available for the linear kernel only.
    pub fn linear_weights(&self) -> Option<Vec<f64>> {
        if self.kernel != KernelSpec::Linear {
            return None;
        }
        let mut w = vec![0.0; self.dim];
        for sv in &self.support {
            let c = sv.alpha * sv.label.sign();
            for (wj, xj) in w.iter_mut().zip(&sv.x) {
                *wj += c * xj;
            }
        }
        Some(w)
    }

    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: x.len(),
            });
        }
        let sum: f64 = self
            .support
            .iter()
            .map(|sv| sv.alpha * sv.label.sign() * self.kernel.eval_unchecked(&sv.x, x))
            .sum();
        Ok(sum + self.bias)
    }

    pub fn classify(&self, x: &[f64], eps_on_plane: f64) -> Result<Classification> {
        Ok(classify_value(self.decision_value(x)?, eps_on_plane))
    }

    pub fn to_text(&self, scaling: Option<&ScalingParams>) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MODEL_MAGIC}");
        match self.kernel {
            KernelSpec::Linear => out.push_str("kernel linear\n"),
            KernelSpec::Rbf { gamma } => {
                let _ = writeln!(out, "kernel rbf {gamma}");
            }
        }
        let _ = writeln!(out, "penalties {} {}", self.penalties.c_plus, self.penalties.c_minus);
        let _ = writeln!(out, "bias {}", self.bias);
        let _ = writeln!(out, "dim {}", self.dim);
        let _ = writeln!(out, "n_train {}", self.dual_coeffs.len());
        if let Some(s) = scaling {
            write_vector(&mut out, "scaling_shift", &s.shift);
            write_vector(&mut out, "scaling_scale", &s.scale);
        }
        for sv in &self.support {
            let _ = write!(out, "sv {} {} {}", sv.index, sv.label.sign() as i64, sv.alpha);
            for v in &sv.x {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<(Self, Option<ScalingParams>)> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, l)) if l.trim() == MODEL_MAGIC => {}
            _ => return Err(Error::parse("model:1", format!("expected header {MODEL_MAGIC:?}"))),
        }
        let mut kernel = None;
        let mut penalties = None;
        let mut bias = None;
        let mut dim = None;
        let mut n_train = None;
        let mut shift = None;
        let mut scale = None;
        let mut support = Vec::new();
        for (i, line) in lines {
            let at = format!("model:{}", i + 1);
            let mut tok = line.split_whitespace();
            let key = tok.next().unwrap_or_default();
            let rest: Vec<&str> = tok.collect();
            let num = |s: &str| s.parse::<f64>().map_err(|e| Error::parse(&at, format!("{s:?}: {e}")));
            match key {
                "kernel" => {
                    kernel = Some(match rest.as_slice() {
                        ["linear"] => KernelSpec::Linear,
                        ["rbf", g] => KernelSpec::rbf(num(g)?)?,
                        _ => return Err(Error::parse(&at, "bad kernel line")),
                    })
                }
                "penalties" => match rest.as_slice() {
                    [a, b] => penalties = Some(PenaltyConfig::new(num(a)?, num(b)?)?),
                    _ => return Err(Error::parse(&at, "bad penalties line")),
                },
                "bias" => bias = Some(num(rest.first().copied().unwrap_or_default())?),
                "dim" | "n_train" => {
                    let v = rest
                        .first()
                        .and_then(|s| s.parse::<usize>().ok())
                        .ok_or_else(|| Error::parse(&at, format!("bad {key} line")))?;
                    if key == "dim" {
                        dim = Some(v)
                    } else {
                        n_train = Some(v)
                    }
                }
                "scaling_shift" => shift = Some(rest.iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?),
                "scaling_scale" => scale = Some(rest.iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?),
                "sv" => {
                    if rest.len() < 3 {
                        return Err(Error::parse(&at, "bad sv line"));
                    }
                    let index = rest[0]
                        .parse::<usize>()
                        .map_err(|e| Error::parse(&at, e.to_string()))?;
                    let label = rest[1]
                        .parse::<i64>()
                        .ok()
                        .and_then(Label::from_sign)
                        .ok_or_else(|| Error::parse(&at, "label must be 1 or -1"))?;
                    let alpha = num(rest[2])?;
                    let x = rest[3..].iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?;
                    support.push(SupportVector { index, label, alpha, x });
                }
                other => return Err(Error::parse(&at, format!("unknown key {other:?}"))),
            }
        }
        let missing = |what: &str| Error::parse("model", format!("missing {what}"));
        let kernel = kernel.ok_or_else(|| missing("kernel"))?;
        let penalties = penalties.ok_or_else(|| missing("penalties"))?;
        let bias = bias.ok_or_else(|| missing("bias"))?;
        let dim = dim.ok_or_else(|| missing("dim"))?;
        let n_train = n_train.ok_or_else(|| missing("n_train"))?;
        let mut dual_coeffs = vec![0.0; n_train];
        for sv in &support {
            if sv.x.len() != dim || sv.index >= n_train {
                return Err(Error::parse("model", format!("support vector {} inconsistent with header", sv.index)));
            }
            dual_coeffs[sv.index] = sv.alpha;
        }
        let scaling = match (shift, scale) {
            (None, None) => None,
            (Some(shift), Some(scale)) => Some(ScalingParams::new(shift, scale)?),
            _ => return Err(Error::parse("model", "scaling_shift and scaling_scale must appear together")),
        };
        Ok((
            Self {
                kernel,
                penalties,
                bias,
                dim,
                dual_coeffs,
                support,
            },
            scaling,
        ))
    }

    pub fn save(&self, path: impl AsRef<Path>, scaling: Option<&ScalingParams>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text(scaling)).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<(Self, Option<ScalingParams>)> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}

pub(crate) fn write_vector(out: &mut String, key: &str, values: &[f64]) {
    out.push_str(key);
    for v in values {
        let _ = write!(out, " {v}");
    }
    out.push('\n');
}

/// Three-way sign with a symmetric dead band of half-width `eps_on_plane`.
pub fn classify_value(f: f64, eps_on_plane: f64) -> Classification {
    if f > eps_on_plane {
        Classification::Positive
    } else if f < -eps_on_plane {
        Classification::Negative
    } else {
        Classification::OnPlane
    }
}
