//! Two-variable decomposition (SMO) for the class-weighted soft-margin dual
//!
//! ```text
//! min  1/2 a'Qa - e'a   s.t.  y'a = 0,  0 <= a_i <= C_{y_i}
//! ```
//!
//! with `Q_ij = y_i y_j K(x_i, x_j)`. Working pairs are chosen as the
//! maximal violating pair. The solver keeps the gradient `G = Qa - e`, from
//! which the objectives, the duality gap and the bias all follow in O(n).

use crate::data::{Dataset, Label};
use crate::error::{Error, Result};

use super::kernel::{GramMatrix, KernelRows, KernelSpec, RowCache, DENSE_GRAM_LIMIT};
use super::model::{PenaltyConfig, SvmModel};

const TAU: f64 = 1e-12;
/// Below this pair gap the iterates are at rounding level.
const MIN_INTERNAL_TOL: f64 = 1e-13;
const ROW_CACHE_BYTES: usize = 256 << 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// KKT tolerance on the maximal violating pair gap.
    pub tol: f64,
    /// Upper bound on pair updates.
    pub max_iter: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-3,
            max_iter: 10_000_000,
        }
    }
}

impl SolverOptions {
    pub fn new(tol: f64, max_iter: u64) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
        }
        if max_iter == 0 {
            return Err(Error::invalid("max_iter must be at least 1"));
        }
        Ok(Self { tol, max_iter })
    }
}

/// Optimality report for a dual solution.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverDiagnostics {
    pub iterations: u64,
    /// Largest of: maximal violating pair gap, `|sum a_i y_i|`, box excess.
    pub max_kkt_violation: f64,
    pub dual_objective: f64,
    pub primal_objective: f64,
    pub duality_gap: f64,
    /// Hinge slacks `max(0, 1 - y_i f(x_i))`.
    pub slacks: Vec<f64>,
}

/// Computes diagnostics from `G = Qa - e`.
pub(crate) fn diagnostics_from_gradient(
    labels: &[Label],
    alpha: &[f64],
    grad: &[f64],
    bias: f64,
    penalties: PenaltyConfig,
    iterations: u64,
) -> SolverDiagnostics {
    let (up, low) = violating_extremes(labels, alpha, grad, penalties);
    let pair_gap = match (up, low) {
        (Some((_, m)), Some((_, mm))) => (m - mm).max(0.0),
        _ => 0.0,
    };
    let mut equality = 0.0;
    let mut box_excess: f64 = 0.0;
    let mut alpha_sum = 0.0;
    let mut w_norm2 = 0.0;
    let mut hinge = 0.0;
    let mut slacks = Vec::with_capacity(alpha.len());
    for (i, label) in labels.iter().enumerate() {
        let y = label.sign();
        let c = penalties.for_label(*label);
        equality += alpha[i] * y;
        box_excess = box_excess.max(-alpha[i]).max(alpha[i] - c);
        alpha_sum += alpha[i];
        w_norm2 += alpha[i] * (grad[i] + 1.0);
        // y_i f(x_i) = G_i + 1 + y_i b
        let xi = (1.0 - (grad[i] + 1.0 + y * bias)).max(0.0);
        hinge += c * xi;
        slacks.push(xi);
    }
    let dual = alpha_sum - 0.5 * w_norm2;
    let primal = 0.5 * w_norm2 + hinge;
    SolverDiagnostics {
        iterations,
        max_kkt_violation: pair_gap.max(equality.abs()).max(box_excess),
        dual_objective: dual,
        primal_objective: primal,
        duality_gap: primal - dual,
        slacks,
    }
}

#[inline]
fn in_up(label: Label, a: f64, c: f64) -> bool {
    match label {
        Label::Positive => a < c,
        Label::Negative => a > 0.0,
    }
}

#[inline]
fn in_low(label: Label, a: f64, c: f64) -> bool {
    match label {
        Label::Positive => a > 0.0,
        Label::Negative => a < c,
    }
}

/// `(argmax_{I_up} -y G, argmin_{I_low} -y G)` with their values.
#[allow(clippy::type_complexity)]
fn violating_extremes(
    labels: &[Label],
    alpha: &[f64],
    grad: &[f64],
    penalties: PenaltyConfig,
) -> (Option<(usize, f64)>, Option<(usize, f64)>) {
    let mut up: Option<(usize, f64)> = None;
    let mut low: Option<(usize, f64)> = None;
    for (t, label) in labels.iter().enumerate() {
        let c = penalties.for_label(*label);
        let v = -label.sign() * grad[t];
        if in_up(*label, alpha[t], c) && up.is_none_or(|(_, m)| v > m) {
            up = Some((t, v));
        }
        if in_low(*label, alpha[t], c) && low.is_none_or(|(_, m)| v < m) {
            low = Some((t, v));
        }
    }
    (up, low)
}

/// Average of `-y G` over free variables, else midpoint of the feasible interval.
pub(crate) fn bias_from_gradient(labels: &[Label], alpha: &[f64], grad: &[f64], penalties: PenaltyConfig) -> f64 {
    let mut free_sum = 0.0;
    let mut free_n = 0usize;
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for (t, label) in labels.iter().enumerate() {
        let c = penalties.for_label(*label);
        let v = -label.sign() * grad[t];
        if alpha[t] > 0.0 && alpha[t] < c {
            free_sum += v;
            free_n += 1;
        } else {
            if in_up(*label, alpha[t], c) {
                lower = lower.max(v);
            }
            if in_low(*label, alpha[t], c) {
                upper = upper.min(v);
            }
        }
    }
    if free_n > 0 {
        free_sum / free_n as f64
    } else if lower.is_finite() && upper.is_finite() {
        0.5 * (lower + upper)
    } else if lower.is_finite() {
        lower
    } else if upper.is_finite() {
        upper
    } else {
        0.0
    }
}

pub(crate) struct DualSolution {
    pub alpha: Vec<f64>,
    pub bias: f64,
    pub diagnostics: SolverDiagnostics,
}

fn solve<K: KernelRows>(
    labels: &[Label],
    rows: &mut K,
    penalties: PenaltyConfig,
    opts: SolverOptions,
) -> Result<DualSolution> {
    let n = labels.len();
    debug_assert_eq!(rows.len(), n);
    let y: Vec<f64> = labels.iter().map(|l| l.sign()).collect();
    let cap: Vec<f64> = labels.iter().map(|l| penalties.for_label(*l)).collect();
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut iterations = 0u64;
    let mut internal_tol = opts.tol;

    loop {
        let (up, low) = violating_extremes(labels, &alpha, &grad, penalties);
        let pair = match (up, low) {
            (Some((i, m)), Some((j, mm))) if m - mm > internal_tol => Some((i, j)),
            _ => None,
        };
        let Some((i, j)) = pair else {
            let bias = bias_from_gradient(labels, &alpha, &grad, penalties);
            let diagnostics = diagnostics_from_gradient(labels, &alpha, &grad, bias, penalties, iterations);
            let gap_ok = diagnostics.duality_gap <= opts.tol * (1.0 + diagnostics.dual_objective.abs());
            if gap_ok || internal_tol <= MIN_INTERNAL_TOL {
                return Ok(DualSolution {
                    alpha,
                    bias,
                    diagnostics,
                });
            }
            internal_tol = (internal_tol * 0.25).max(MIN_INTERNAL_TOL);
            continue;
        };

        if iterations >= opts.max_iter {
            let bias = bias_from_gradient(labels, &alpha, &grad, penalties);
            let diagnostics = diagnostics_from_gradient(labels, &alpha, &grad, bias, penalties, iterations);
            return Err(Error::NonConvergence {
                diagnostics: Box::new(diagnostics),
            });
        }
        iterations += 1;

        let (kii, kjj) = (rows.diag(i), rows.diag(j));
        let (ci, cj) = (cap[i], cap[j]);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        rows.with_rows(i, j, |ki, kj| {
            let kij = ki[j];
            let mut quad = kii + kjj - 2.0 * kij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let (mut ai, mut aj) = (old_i, old_j);
            if y[i] != y[j] {
                let delta = (-grad[i] - grad[j]) / quad;
                let diff = ai - aj;
                ai += delta;
                aj += delta;
                if diff > 0.0 {
                    if aj < 0.0 {
                        aj = 0.0;
                        ai = diff;
                    }
                } else if ai < 0.0 {
                    ai = 0.0;
                    aj = -diff;
                }
                if diff > ci - cj {
                    if ai > ci {
                        ai = ci;
                        aj = ci - diff;
                    }
                } else if aj > cj {
                    aj = cj;
                    ai = cj + diff;
                }
            } else {
                let delta = (grad[i] - grad[j]) / quad;
                let sum = ai + aj;
                ai -= delta;
                aj += delta;
                if sum > ci {
                    if ai > ci {
                        ai = ci;
                        aj = sum - ci;
                    }
                } else if aj < 0.0 {
                    aj = 0.0;
                    ai = sum;
                }
                if sum > cj {
                    if aj > cj {
                        aj = cj;
                        ai = sum - cj;
                    }
                } else if ai < 0.0 {
                    ai = 0.0;
                    aj = sum;
                }
            }
            alpha[i] = ai;
            alpha[j] = aj;
            let di = (ai - old_i) * y[i];
            let dj = (aj - old_j) * y[j];
            for t in 0..n {
                grad[t] += y[t] * (ki[t] * di + kj[t] * dj);
            }
        });
    }
}

fn check_trainable(ds: &Dataset, kernel: KernelSpec, penalties: PenaltyConfig) -> Result<()> {
    kernel.validate()?;
    penalties.validate()?;
    let (n_plus, n_minus) = ds.class_counts();
    if n_plus == 0 || n_minus == 0 {
        return Err(Error::SingleClass { n_plus, n_minus });
    }
    Ok(())
}

/// Trains on `train` with a precomputed kernel matrix of the same rows.
pub fn train_with_gram(
    train: &Dataset,
    gram: &GramMatrix,
    penalties: PenaltyConfig,
    opts: SolverOptions,
) -> Result<(SvmModel, SolverDiagnostics)> {
    check_trainable(train, gram.kernel(), penalties)?;
    if gram.len() != train.len() {
        return Err(Error::DimensionMismatch {
            expected: train.len(),
            actual: gram.len(),
        });
    }
    let sol = solve(train.labels(), &mut &*gram, penalties, opts)?;
    let model = SvmModel::from_parts(train, gram.kernel(), penalties, sol.alpha, sol.bias)?;
    Ok((model, sol.diagnostics))
}

/// Trains a class-weighted soft-margin SVM.
///
/// Stops once the maximal violating pair gap is below `tol` and the duality
/// gap is below `tol * (1 + |dual objective|)`.
pub fn train_weighted_svm(
    train: &Dataset,
    kernel: KernelSpec,
    penalties: PenaltyConfig,
    tol: f64,
    max_iter: u64,
) -> Result<(SvmModel, SolverDiagnostics)> {
    let opts = SolverOptions::new(tol, max_iter)?;
    check_trainable(train, kernel, penalties)?;
    if train.len() <= DENSE_GRAM_LIMIT {
        let gram = GramMatrix::compute(train, kernel)?;
        return train_with_gram(train, &gram, penalties, opts);
    }
    let mut cache = RowCache::with_budget(train, kernel, ROW_CACHE_BYTES);
    let sol = solve(train.labels(), &mut cache, penalties, opts)?;
    let model = SvmModel::from_parts(train, kernel, penalties, sol.alpha, sol.bias)?;
    Ok((model, sol.diagnostics))
}

/// Re-derives the optimality diagnostics of `model` on its training set.
pub fn check_kkt(model: &SvmModel, train: &Dataset) -> Result<SolverDiagnostics> {
    if train.len() != model.dual_coeffs().len() || train.dim() != model.dim() {
        return Err(Error::invalid(format!(
            "model was trained on {} rows of dimension {}, got {} rows of dimension {}",
            model.dual_coeffs().len(),
            model.dim(),
            train.len(),
            train.dim()
        )));
    }
    let alpha = model.dual_coeffs();
    let kernel = model.kernel();
    let grad: Vec<f64> = (0..train.len())
        .map(|i| {
            let xi = train.row(i);
            let s: f64 = model
                .support_vectors()
                .iter()
                .map(|sv| sv.alpha * sv.label.sign() * kernel.eval_unchecked(&sv.x, xi))
                .sum();
            train.label(i).sign() * s - 1.0
        })
        .collect();
    Ok(diagnostics_from_gradient(
        train.labels(),
        alpha,
        &grad,
        model.bias(),
        model.penalties(),
        0,
    ))
}
