//! Effective point counts and the closed-form implied posterior along a
//! reweighted separating surface.
//!
//! A class with `n` rows and per-row penalty `C` carries `C * n` effective
//! points. Reweighting multiplies the positive penalty by `z+` and the
//! negative one by `z-`, keeping the total budget fixed at the 0.5/0.5
//! baseline:
//!
//! ```text
//! z+ C+ n+ + z- C- n- = 0.5 C+ n+ + 0.5 C- n-
//! ```
//!
//! The posterior implied along the resulting surface is
//! `z+ e- / ((0.5 + z+) e- + (0.5 - z+) e+)` with `e± = C± n±`.

use crate::error::{Error, Result};
use crate::kernel_svm::PenaltyConfig;

/// Penalty-weighted class sizes `(C+ n+, C- n-)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveCounts {
    e_plus: f64,
    e_minus: f64,
}

impl EffectiveCounts {
    pub fn new(e_plus: f64, e_minus: f64) -> Result<Self> {
        if !(e_plus > 0.0 && e_plus.is_finite() && e_minus > 0.0 && e_minus.is_finite()) {
            return Err(Error::invalid(format!(
                "effective counts must be positive and finite, got ({e_plus}, {e_minus})"
            )));
        }
        Ok(Self { e_plus, e_minus })
    }

    pub fn from_penalties(n_plus: usize, n_minus: usize, penalties: PenaltyConfig) -> Result<Self> {
        Self::new(penalties.c_plus * n_plus as f64, penalties.c_minus * n_minus as f64)
    }

    /// Equal counts, the regime in which the implied level is `z+` itself.
    pub fn balanced() -> Self {
        Self {
            e_plus: 1.0,
            e_minus: 1.0,
        }
    }

    pub fn e_plus(&self) -> f64 {
        self.e_plus
    }

    pub fn e_minus(&self) -> f64 {
        self.e_minus
    }

    pub fn total(&self) -> f64 {
        self.e_plus + self.e_minus
    }

    /// Estimated prior `P(+)`.
    pub fn prior_plus(&self) -> f64 {
        self.e_plus / self.total()
    }

    pub fn prior_minus(&self) -> f64 {
        self.e_minus / self.total()
    }

    /// The fixed budget `0.5 e+ + 0.5 e-`.
    pub fn budget(&self) -> f64 {
        0.5 * self.e_plus + 0.5 * self.e_minus
    }
}

/// Multiplicative class weights that preserve the effective budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightPair {
    pub z_plus: f64,
    pub z_minus: f64,
}

impl WeightPair {
    /// Pairs `z_plus` with the `z-` that keeps the budget of `counts`.
    pub fn for_z_plus(z_plus: f64, counts: &EffectiveCounts) -> Result<Self> {
        Ok(Self {
            z_plus,
            z_minus: z_minus_for_z_plus(z_plus, counts)?,
        })
    }

    /// `z+ e+ + z- e- - budget`.
    pub fn budget_residual(&self, counts: &EffectiveCounts) -> f64 {
        self.z_plus * counts.e_plus + self.z_minus * counts.e_minus - counts.budget()
    }

    /// Penalties `(z+ C+, z- C-)` applied to the training problem.
    pub fn apply(&self, base: PenaltyConfig) -> Result<PenaltyConfig> {
        PenaltyConfig::new(self.z_plus * base.c_plus, self.z_minus * base.c_minus)
    }

    /// Additive form: `z+ C+ = 0.5 C+ + delta+`, so `delta+ = (z+ - 0.5) C+`.
    pub fn delta_plus(&self, c_plus: f64) -> f64 {
        (self.z_plus - 0.5) * c_plus
    }

    pub fn delta_minus(&self, c_minus: f64) -> f64 {
        (0.5 - self.z_minus) * c_minus
    }
}

/// Decrease of the negative penalty matching an increase `delta_plus` of the
/// positive one at constant budget.
pub fn delta_minus_for_delta_plus(delta_plus: f64, n_plus: usize, n_minus: usize) -> Result<f64> {
    if n_minus == 0 {
        return Err(Error::invalid("n_minus must be positive"));
    }
    Ok(delta_plus * n_plus as f64 / n_minus as f64)
}

/// Open interval `(0, budget / e+)` of admissible `z+`.
pub fn z_plus_bounds(counts: &EffectiveCounts) -> (f64, f64) {
    (0.0, counts.budget() / counts.e_plus)
}

fn check_z_plus(z_plus: f64, counts: &EffectiveCounts) -> Result<()> {
    let (lo, hi) = z_plus_bounds(counts);
    if z_plus > lo && z_plus < hi {
        Ok(())
    } else {
        Err(Error::invalid(format!("z+ = {z_plus} outside ({lo}, {hi})")))
    }
}

pub fn z_minus_for_z_plus(z_plus: f64, counts: &EffectiveCounts) -> Result<f64> {
    check_z_plus(z_plus, counts)?;
    Ok(0.5 + (0.5 - z_plus) * counts.e_plus / counts.e_minus)
}

/// Implied level when `e+ = e-`: the positive weight share itself.
pub fn implied_probability_balanced(z_plus: f64) -> Result<f64> {
    if z_plus > 0.0 && z_plus < 1.0 {
        Ok(z_plus)
    } else {
        Err(Error::invalid(format!("z+ = {z_plus} outside (0, 1)")))
    }
}

pub fn implied_probability_general(z_plus: f64, counts: &EffectiveCounts) -> Result<f64> {
    check_z_plus(z_plus, counts)?;
    let (b, a) = (counts.e_plus, counts.e_minus);
    Ok(z_plus / (0.5 + z_plus + (0.5 - z_plus) * (b / a)))
}

/// Balanced classes and a common applied penalty `c`, shifted additively:
/// `0.5 + 0.5 delta+ / c`.
pub fn implied_probability_balanced_reduced(delta_plus: f64, c: f64) -> Result<f64> {
    if c.is_nan() || c <= 0.0 || delta_plus.abs() >= c {
        return Err(Error::invalid(format!("need |delta+| < c, got delta+ = {delta_plus}, c = {c}")));
    }
    Ok(0.5 + 0.5 * delta_plus / c)
}

/// Inverse of [`implied_probability_general`].
pub fn z_plus_for_target_probability(p: f64, counts: &EffectiveCounts) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!("target probability {p} outside (0, 1)")));
    }
    let (b, a) = (counts.e_plus, counts.e_minus);
    Ok(0.5 * p * (a + b) / (a - p * (a - b)))
}
