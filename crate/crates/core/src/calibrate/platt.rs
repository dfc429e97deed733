use crate::data::Label;
use crate::error::{Error, Result};

const MAX_ITER: usize = 100;
const GRAD_TOL: f64 = 1e-10;
const MIN_STEP: f64 = 1e-10;
/// Hessian ridge keeping the Newton system solvable when scores are constant.
const RIDGE: f64 = 1e-12;

/// Sigmoid `P(+ | f) = 1 / (1 + exp(A f + B))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlattParams {
    pub a: f64,
    pub b: f64,
}

impl PlattParams {
    pub fn apply(&self, score: f64) -> f64 {
        apply_platt(*self, score)
    }
}

pub fn apply_platt(p: PlattParams, score: f64) -> f64 {
    let z = p.a * score + p.b;
    // stable in both tails
    if z >= 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    }
}

/// Smoothed targets `(N+ + 1)/(N+ + 2)` for positives and `1/(N- + 2)` for negatives.
pub fn platt_targets(labels: &[Label]) -> Vec<f64> {
    let n_plus = labels.iter().filter(|l| **l == Label::Positive).count() as f64;
    let n_minus = labels.len() as f64 - n_plus;
    let hi = (n_plus + 1.0) / (n_plus + 2.0);
    let lo = 1.0 / (n_minus + 2.0);
    labels
        .iter()
        .map(|l| if *l == Label::Positive { hi } else { lo })
        .collect()
}

fn objective(scores: &[f64], targets: &[f64], a: f64, b: f64) -> f64 {
    scores
        .iter()
        .zip(targets)
        .map(|(f, t)| {
            let z = f * a + b;
            if z >= 0.0 {
                t * z + (-z).exp().ln_1p()
            } else {
                (t - 1.0) * z + z.exp().ln_1p()
            }
        })
        .sum()
}

/// Fits `(A, B)` by Newton's method with backtracking on the smoothed
/// cross-entropy.
pub fn fit_platt(scores: &[f64], labels: &[Label]) -> Result<PlattParams> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            actual: scores.len(),
        });
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::invalid("Platt scaling needs finite scores"));
    }
    let n_plus = labels.iter().filter(|l| **l == Label::Positive).count();
    let n_minus = labels.len() - n_plus;
    if n_plus == 0 || n_minus == 0 {
        return Err(Error::SingleClass { n_plus, n_minus });
    }
    let t = platt_targets(labels);
    let mut a = 0.0;
    let mut b = ((n_minus as f64 + 1.0) / (n_plus as f64 + 1.0)).ln();
    let mut fval = objective(scores, &t, a, b);

    for _ in 0..MAX_ITER {
        let (mut h11, mut h22, mut h21, mut g1, mut g2) = (RIDGE, RIDGE, 0.0, 0.0, 0.0);
        for (f, ti) in scores.iter().zip(&t) {
            let z = f * a + b;
            let (p, q) = if z >= 0.0 {
                let e = (-z).exp();
                (e / (1.0 + e), 1.0 / (1.0 + e))
            } else {
                let e = z.exp();
                (1.0 / (1.0 + e), e / (1.0 + e))
            };
            let d2 = p * q;
            h11 += f * f * d2;
            h22 += d2;
            h21 += f * d2;
            let d1 = ti - p;
            g1 += f * d1;
            g2 += d1;
        }
        if g1.abs() < GRAD_TOL && g2.abs() < GRAD_TOL {
            break;
        }
        let det = h11 * h22 - h21 * h21;
        let da = -(h22 * g1 - h21 * g2) / det;
        let db = -(-h21 * g1 + h11 * g2) / det;
        let gd = g1 * da + g2 * db;
        let mut step = 1.0;
        let mut accepted = false;
        while step >= MIN_STEP {
            let (na, nb) = (a + step * da, b + step * db);
            let nf = objective(scores, &t, na, nb);
            if nf < fval + 1e-4 * step * gd {
                a = na;
                b = nb;
                fval = nf;
                accepted = true;
                break;
            }
            step /= 2.0;
        }
        if !accepted {
            break;
        }
    }
    Ok(PlattParams { a, b })
}
