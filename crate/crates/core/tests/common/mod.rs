//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use implied_svm::data::{Dataset, Label};
use implied_svm::kernel_svm::PenaltyConfig;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rbf(gamma: f64, a: &[f64], b: &[f64]) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dual QP data: `min 1/2 a'Qa - e'a` s.t. `y'a = 0`, `0 <= a_i <= c_i`.
pub struct DualProblem {
    pub q: DMatrix<f64>,
    pub y: Vec<f64>,
    pub c: Vec<f64>,
}

impl DualProblem {
    pub fn new(ds: &Dataset, kernel: impl Fn(&[f64], &[f64]) -> f64, p: PenaltyConfig) -> Self {
        let n = ds.len();
        let y: Vec<f64> = ds.labels().iter().map(|l| l.sign()).collect();
        let q = DMatrix::from_fn(n, n, |i, j| y[i] * y[j] * kernel(ds.row(i), ds.row(j)));
        let c = ds.labels().iter().map(|l| p.for_label(*l)).collect();
        Self { q, y, c }
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn objective(&self, a: &[f64]) -> f64 {
        let v = DVector::from_column_slice(a);
        0.5 * v.dot(&(&self.q * &v)) - v.sum()
    }

    /// Smallest eigenvalue of Q restricted to the hyperplane `y'a = 0`.
    pub fn strong_convexity(&self) -> f64 {
        let n = self.n();
        let y = DVector::from_column_slice(&self.y);
        let p = DMatrix::identity(n, n) - &y * y.transpose() / n as f64;
        let shift = 1e6;
        let m = &p * &self.q * &p + shift * &y * y.transpose() / n as f64;
        let eig = SymmetricEigen::new(m);
        eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Enumerates every (lower, upper, free) assignment and solves the KKT
    /// system of the free block; returns the best KKT point.
    pub fn active_set_optimum(&self) -> Vec<f64> {
        let n = self.n();
        let mut best: Option<(f64, Vec<f64>)> = None;
        let total = 3usize.pow(n as u32);
        for code in 0..total {
            let mut state = vec![0u8; n];
            let mut c = code;
            for s in state.iter_mut() {
                *s = (c % 3) as u8;
                c /= 3;
            }
            if let Some(a) = self.kkt_point(&state) {
                let f = self.objective(&a);
                if best.as_ref().is_none_or(|(bf, _)| f < *bf) {
                    best = Some((f, a));
                }
            }
        }
        best.expect("a convex QP always has a KKT point").1
    }

    /// state: 0 = at zero, 1 = at upper bound, 2 = free.
    fn kkt_point(&self, state: &[u8]) -> Option<Vec<f64>> {
        let n = self.n();
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        let mut a = vec![0.0; n];
        for i in 0..n {
            if state[i] == 1 {
                a[i] = self.c[i];
            }
        }
        if free.is_empty() {
            let eq: f64 = (0..n).map(|i| self.y[i] * a[i]).sum();
            if eq.abs() > 1e-12 {
                return None;
            }
            let g = self.gradient(&a);
            // need g_i + nu y_i >= 0 at zero, <= 0 at upper bound
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            for i in 0..n {
                let bound = -g[i] * self.y[i];
                let at_zero = state[i] == 0;
                if (self.y[i] > 0.0) == at_zero {
                    lo = lo.max(bound);
                } else {
                    hi = hi.min(bound);
                }
            }
            if lo > hi + 1e-9 {
                return None;
            }
            return Some(a);
        }
        let m = free.len();
        let mut lhs = DMatrix::zeros(m + 1, m + 1);
        let mut rhs = DVector::zeros(m + 1);
        for (r, &i) in free.iter().enumerate() {
            for (s, &j) in free.iter().enumerate() {
                lhs[(r, s)] = self.q[(i, j)];
            }
            lhs[(r, m)] = self.y[i];
            lhs[(m, r)] = self.y[i];
            let fixed: f64 = (0..n).filter(|&j| state[j] == 1).map(|j| self.q[(i, j)] * a[j]).sum();
            rhs[r] = 1.0 - fixed;
        }
        rhs[m] = -(0..n).filter(|&j| state[j] == 1).map(|j| self.y[j] * a[j]).sum::<f64>();
        let sol = lhs.lu().solve(&rhs)?;
        for (r, &i) in free.iter().enumerate() {
            if sol[r] < -1e-10 || sol[r] > self.c[i] + 1e-10 {
                return None;
            }
            a[i] = sol[r].clamp(0.0, self.c[i]);
        }
        let nu = sol[m];
        let g = self.gradient(&a);
        for i in 0..n {
            let r = g[i] + nu * self.y[i];
            match state[i] {
                0 if r < -1e-9 => return None,
                1 if r > 1e-9 => return None,
                _ => {}
            }
        }
        Some(a)
    }

    pub fn gradient(&self, a: &[f64]) -> Vec<f64> {
        let v = DVector::from_column_slice(a);
        (&self.q * v).iter().map(|g| g - 1.0).collect()
    }

    /// Completes the first n-1 coordinates with the equality constraint.
    fn complete(&self, head: &[f64]) -> Option<Vec<f64>> {
        let n = self.n();
        let s: f64 = head.iter().zip(&self.y).map(|(a, y)| a * y).sum();
        let last = -self.y[n - 1] * s;
        if last < -1e-15 || last > self.c[n - 1] + 1e-15 {
            return None;
        }
        let mut a = head.to_vec();
        a.push(last.clamp(0.0, self.c[n - 1]));
        Some(a)
    }

    fn grid_search(&self, lo: &[f64], hi: &[f64], steps: usize) -> Option<(f64, Vec<f64>)> {
        let dims = lo.len();
        let mut idx = vec![0usize; dims];
        let mut best: Option<(f64, Vec<f64>)> = None;
        loop {
            let head: Vec<f64> = (0..dims)
                .map(|k| lo[k] + (hi[k] - lo[k]) * idx[k] as f64 / steps as f64)
                .collect();
            if let Some(a) = self.complete(&head) {
                let f = self.objective(&a);
                if best.as_ref().is_none_or(|(bf, _)| f < *bf) {
                    best = Some((f, a));
                }
            }
            let mut k = 0;
            loop {
                if k == dims {
                    return best;
                }
                idx[k] += 1;
                if idx[k] <= steps {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    /// Dense search over the feasible dual box at spacing `resolution`.
    pub fn full_grid(&self, resolution: f64) -> (f64, Vec<f64>) {
        let n = self.n();
        let lo = vec![0.0; n - 1];
        let hi: Vec<f64> = self.c[..n - 1].to_vec();
        let steps = (hi.iter().copied().fold(0.0, f64::max) / resolution).round() as usize;
        self.grid_search(&lo, &hi, steps).expect("alpha = 0 is feasible")
    }

    /// Pattern search over the feasible lattice: moves to the best point of
    /// the {-3..3}^d stencil around the incumbent, halving the spacing only
    /// when no neighbour improves, until the spacing reaches `resolution`.
    /// Every edge of the feasible polytope has direction entries in {-1, 0, 1},
    /// so the stencil cannot stall short of the optimum.
    pub fn zoom_grid(&self, resolution: f64) -> (f64, Vec<f64>) {
        let n = self.n();
        let dims = n - 1;
        let m: i64 = 3;
        let mut spacing = self.c.iter().copied().fold(0.0, f64::max) / 8.0;
        let mut x = vec![0.0; dims];
        let mut best = (self.objective(&vec![0.0; n]), vec![0.0; n]);
        loop {
            let mut improved: Option<(f64, Vec<f64>, Vec<f64>)> = None;
            let mut off = vec![-m; dims];
            loop {
                let head: Vec<f64> = (0..dims).map(|k| x[k] + off[k] as f64 * spacing).collect();
                let inside = head.iter().zip(&self.c).all(|(v, c)| *v >= -1e-15 && *v <= c + 1e-15);
                if inside {
                    let head: Vec<f64> = head.iter().zip(&self.c).map(|(v, c)| v.clamp(0.0, *c)).collect();
                    if let Some(a) = self.complete(&head) {
                        let f = self.objective(&a);
                        let bar = improved.as_ref().map_or(best.0, |b| b.0);
                        if f < bar {
                            improved = Some((f, a, head));
                        }
                    }
                }
                let mut k = 0;
                while k < dims {
                    off[k] += 1;
                    if off[k] <= m {
                        break;
                    }
                    off[k] = -m;
                    k += 1;
                }
                if k == dims {
                    break;
                }
            }
            match improved {
                Some((f, a, head)) => {
                    best = (f, a);
                    x = head;
                }
                None if spacing <= resolution => return best,
                None => spacing /= 2.0,
            }
        }
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn l2_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Random dataset with both classes, points uniform in `[-1, 1]^dim`.
pub fn random_dataset(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Dataset {
    assert!(n >= 2);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let mut labels: Vec<Label> = (0..n)
        .map(|_| if rng.random_bool(0.5) { Label::Positive } else { Label::Negative })
        .collect();
    let k = rng.random_range(0..n);
    labels[k] = Label::Positive;
    labels[(k + 1) % n] = Label::Negative;
    Dataset::from_rows(&rows, labels).unwrap()
}

/// Least-squares monotone fit by exhaustive search over contiguous
/// partitions of the tie-pooled, score-sorted points. Returns the fitted
/// value for each input point.
pub fn isotonic_oracle(scores: &[f64], targets: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| scores[i].total_cmp(&scores[j]));
    // groups of equal score: (sum, count, members)
    let mut groups: Vec<(f64, f64, Vec<usize>)> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some(g) if scores[g.2[0]] == scores[i] => {
                g.0 += targets[i];
                g.1 += 1.0;
                g.2.push(i);
            }
            _ => groups.push((targets[i], 1.0, vec![i])),
        }
    }
    let g = groups.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for cuts in 0..(1u64 << (g - 1)) {
        let mut means = Vec::new();
        let mut fit = vec![0.0; scores.len()];
        let mut start = 0;
        for end in 0..g {
            let boundary = end == g - 1 || cuts & (1 << end) != 0;
            if !boundary {
                continue;
            }
            let sum: f64 = groups[start..=end].iter().map(|x| x.0).sum();
            let cnt: f64 = groups[start..=end].iter().map(|x| x.1).sum();
            let m = sum / cnt;
            means.push(m);
            for grp in &groups[start..=end] {
                for &i in &grp.2 {
                    fit[i] = m;
                }
            }
            start = end + 1;
        }
        if means.windows(2).any(|w| w[1] < w[0]) {
            continue;
        }
        let sse: f64 = fit.iter().zip(targets).map(|(f, t)| (f - t) * (f - t)).sum();
        if best.as_ref().is_none_or(|(b, _)| sse < *b - 1e-15) {
            best = Some((sse, fit));
        }
    }
    best.expect("one block is always monotone").1
}

/// Probability that a random positive outscores a random negative, ties 1/2.
pub fn concordance(scores: &[f64], labels01: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut pairs = 0.0;
    for i in 0..scores.len() {
        if labels01[i] != 1.0 {
            continue;
        }
        for j in 0..scores.len() {
            if labels01[j] != 0.0 {
                continue;
            }
            pairs += 1.0;
            if scores[i] > scores[j] {
                num += 1.0;
            } else if scores[i] == scores[j] {
                num += 0.5;
            }
        }
    }
    num / pairs
}

/// Negative log-likelihood of `1 / (1 + exp(a f + b))` against Platt's
/// smoothed targets.
pub fn platt_nll(a: f64, b: f64, scores: &[f64], labels: &[Label]) -> f64 {
    let np = labels.iter().filter(|l| **l == Label::Positive).count() as f64;
    let nn = labels.len() as f64 - np;
    let hi = (np + 1.0) / (np + 2.0);
    let lo = 1.0 / (nn + 2.0);
    let softplus = |z: f64| if z > 0.0 { z + (-z).exp().ln_1p() } else { z.exp().ln_1p() };
    scores
        .iter()
        .zip(labels)
        .map(|(f, l)| {
            let t = if *l == Label::Positive { hi } else { lo };
            let z = a * f + b;
            // -[t log p + (1 - t) log(1 - p)], p = 1 / (1 + e^z)
            t * softplus(z) + (1.0 - t) * softplus(-z)
        })
        .sum()
}

/// Minimum NLL over a grid on `[-20, 20]^2`: coarse pass, then a 1e-3 pass
/// in a window around the coarse winner.
pub fn platt_grid_search(scores: &[f64], labels: &[Label]) -> (f64, f64, f64) {
    let mut best = (f64::INFINITY, 0.0, 0.0);
    let coarse = 0.05;
    let steps = (40.0 / coarse) as i64;
    for i in 0..=steps {
        for j in 0..=steps {
            let a = -20.0 + i as f64 * coarse;
            let b = -20.0 + j as f64 * coarse;
            let v = platt_nll(a, b, scores, labels);
            if v < best.0 {
                best = (v, a, b);
            }
        }
    }
    let fine = 1e-3;
    let (a0, b0) = (best.1, best.2);
    let half = (coarse / fine) as i64;
    for i in -half..=half {
        for j in -half..=half {
            let a = (a0 + i as f64 * fine).clamp(-20.0, 20.0);
            let b = (b0 + j as f64 * fine).clamp(-20.0, 20.0);
            let v = platt_nll(a, b, scores, labels);
            if v < best.0 {
                best = (v, a, b);
            }
        }
    }
    best
}

/// Randomized checks of the weighting algebra over `draws` samples of
/// (counts, z+). Returns the first violation found.
pub fn weighting_formula_suite(draws: usize, seed: u64) -> Result<(), String> {
    use implied_svm::weighting::*;
    let mut r = rng(seed);
    let tol = 1e-12;
    for i in 0..draws {
        let e_plus = 10f64.powf(r.random_range(0.0..3.0));
        let e_minus = 10f64.powf(r.random_range(0.0..3.0));
        let counts = EffectiveCounts::new(e_plus, e_minus).map_err(|e| e.to_string())?;
        let (lo, hi) = z_plus_bounds(&counts);
        if lo != 0.0 || (hi - counts.budget() / e_plus).abs() > tol * hi {
            return Err(format!("draw {i}: bounds ({lo}, {hi})"));
        }
        let z = hi * r.random_range(1e-3..1.0 - 1e-3);
        let pair = WeightPair::for_z_plus(z, &counts).map_err(|e| e.to_string())?;
        if pair.z_minus <= 0.0 {
            return Err(format!("draw {i}: z- = {}", pair.z_minus));
        }
        if pair.budget_residual(&counts).abs() > tol * counts.budget() {
            return Err(format!("draw {i}: budget residual {}", pair.budget_residual(&counts)));
        }
        let p = implied_probability_general(z, &counts).map_err(|e| e.to_string())?;
        if !(p > 0.0 && p < 1.0) {
            return Err(format!("draw {i}: probability {p} outside (0, 1)"));
        }
        // density-ratio route: ratio z- e- / (z+ e+) times prior ratio e+ / e-
        let ratio = pair.z_minus * e_minus / (z * e_plus);
        let bayes = 1.0 / (1.0 + ratio * counts.prior_plus() / counts.prior_minus());
        if (bayes - p).abs() > tol {
            return Err(format!("draw {i}: density-ratio route {bayes} vs {p}"));
        }
        let back = z_plus_for_target_probability(p, &counts).map_err(|e| e.to_string())?;
        if (back - z).abs() > tol * hi.max(1.0) {
            return Err(format!("draw {i}: z+ round trip {z} -> {p} -> {back}"));
        }
        let q = r.random_range(1e-6..1.0 - 1e-6);
        let zq = z_plus_for_target_probability(q, &counts).map_err(|e| e.to_string())?;
        if !(zq > lo && zq < hi) {
            return Err(format!("draw {i}: inverse {zq} outside bounds"));
        }
        let q_back = implied_probability_general(zq, &counts).map_err(|e| e.to_string())?;
        if (q_back - q).abs() > tol {
            return Err(format!("draw {i}: p round trip {q} -> {zq} -> {q_back}"));
        }
        let z2 = (z + hi * r.random_range(1e-6..1e-3)).min(hi * (1.0 - 1e-9));
        let p2 = implied_probability_general(z2, &counts).map_err(|e| e.to_string())?;
        if p2 <= p {
            return Err(format!("draw {i}: not increasing, P({z}) = {p}, P({z2}) = {p2}"));
        }
        if e_plus == e_minus || i % 2 == 0 {
            // the balanced reduction on equal counts
            let bal = EffectiveCounts::new(e_plus, e_plus).map_err(|e| e.to_string())?;
            let zb = r.random_range(1e-3..1.0 - 1e-3);
            let pg = implied_probability_general(zb, &bal).map_err(|e| e.to_string())?;
            let pb = implied_probability_balanced(zb).map_err(|e| e.to_string())?;
            if (pg - pb).abs() > tol {
                return Err(format!("draw {i}: balanced reduction {pg} vs {pb}"));
            }
            let c_base = 10f64.powf(r.random_range(-1.0..2.0));
            let delta = WeightPair::for_z_plus(zb, &bal).map_err(|e| e.to_string())?.delta_plus(c_base);
            let pr = implied_probability_balanced_reduced(delta, 0.5 * c_base).map_err(|e| e.to_string())?;
            if (pr - pb).abs() > tol {
                return Err(format!("draw {i}: additive form {pr} vs {pb}"));
            }
        }
    }
    Ok(())
}

/// A K-model grid of constant classifiers over one-dimensional inputs:
/// entry `j` (1-based) says positive iff `j` is in `positive_levels`.
pub fn constant_grid(k: usize, positive_levels: &[usize]) -> implied_svm::implied::HyperplaneGrid {
    use implied_svm::implied::{grid_levels, GridEntry, GridMode, HyperplaneGrid};
    use implied_svm::kernel_svm::{KernelSpec, SvmModel};
    use implied_svm::weighting::{EffectiveCounts, WeightPair};
    let train = Dataset::from_rows(&[vec![0.0], vec![1.0]], vec![Label::Negative, Label::Positive]).unwrap();
    let base = PenaltyConfig::symmetric(1.0).unwrap();
    let counts = EffectiveCounts::balanced();
    let mut entries = vec![GridEntry { level: 0.0, weights: None, model: None }];
    for (j, level) in grid_levels(k).into_iter().enumerate() {
        let bias = if positive_levels.contains(&(j + 1)) { 1.0 } else { -1.0 };
        let weights = WeightPair::for_z_plus(level, &counts).unwrap();
        let model = SvmModel::from_parts(&train, KernelSpec::Linear, weights.apply(base).unwrap(), vec![0.0; 2], bias)
            .unwrap();
        entries.push(GridEntry { level, weights: Some(weights), model: Some(model) });
    }
    entries.push(GridEntry { level: 1.0, weights: None, model: None });
    HyperplaneGrid::from_entries(entries, base, counts, KernelSpec::Linear, GridMode::BalancedAssumption).unwrap()
}

/// PAVA against the exhaustive oracle on random 0/1 instances with
/// `n <= 8`, including tied scores. Exact equality.
pub fn isotonic_suite(instances: usize, seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    for case in 0..instances {
        let n = r.random_range(1..=8);
        let distinct = r.random_range(1..=n);
        let scores: Vec<f64> = (0..n).map(|_| r.random_range(0..distinct) as f64 * 0.25 - 0.5).collect();
        let targets: Vec<f64> = (0..n).map(|_| if r.random_bool(0.5) { 1.0 } else { 0.0 }).collect();
        let fit = implied_svm::calibrate::fit_isotonic(&scores, &targets).map_err(|e| e.to_string())?;
        let expected = isotonic_oracle(&scores, &targets);
        for i in 0..n {
            if fit.eval(scores[i]) != expected[i] {
                return Err(format!(
                    "case {case}: scores {scores:?} targets {targets:?}: fit {} at {i}, oracle {}",
                    fit.eval(scores[i]),
                    expected[i]
                ));
            }
        }
        if fit.values.windows(2).any(|w| w[1] < w[0]) || fit.breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(format!("case {case}: step function not monotone"));
        }
    }
    Ok(())
}

/// Curve AUC against pairwise concordance on random inputs with `n <= 50`.
pub fn auc_suite(instances: usize, seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    for case in 0..instances {
        let n = r.random_range(2..=50);
        let coarse = r.random_bool(0.5);
        let scores: Vec<f64> = (0..n)
            .map(|_| if coarse { r.random_range(0..5) as f64 } else { r.random_range(-3.0..3.0) })
            .collect();
        let mut labels: Vec<f64> = (0..n).map(|_| if r.random_bool(0.4) { 1.0 } else { 0.0 }).collect();
        labels[0] = 1.0;
        labels[n - 1] = 0.0;
        let roc = implied_svm::calibrate::roc_and_auc(&scores, &labels).map_err(|e| e.to_string())?;
        let c = concordance(&scores, &labels);
        if (roc.auc - c).abs() > 1e-12 {
            return Err(format!("case {case}: auc {} vs concordance {c}", roc.auc));
        }
    }
    Ok(())
}

/// Trains on a random dataset with `n <= 5` and mixed class penalties and
/// checks the result against both dual oracles and the optimality report.
pub fn solver_oracle_case(r: &mut ChaCha8Rng, tol: f64) -> Result<(), String> {
    use implied_svm::kernel_svm::{check_kkt, train_weighted_svm, KernelSpec};
    let n = r.random_range(2..=5);
    let ds = random_dataset(r, n, 2);
    let gamma = r.random_range(0.5..2.0);
    let p = PenaltyConfig::new(r.random_range(0.05..5.0), r.random_range(0.05..5.0)).unwrap();
    let (m, d) = train_weighted_svm(&ds, KernelSpec::Rbf { gamma }, p, tol, 10_000_000).map_err(|e| e.to_string())?;
    let alpha = m.dual_coeffs();
    let mut eq = 0.0;
    for (i, a) in alpha.iter().enumerate() {
        let c = p.for_label(ds.label(i));
        if !(*a >= 0.0 && *a <= c) {
            return Err(format!("alpha {a} outside [0, {c}]"));
        }
        eq += a * ds.label(i).sign();
    }
    let scale = 1.0 + d.dual_objective.abs();
    if eq.abs() > tol || d.max_kkt_violation > tol {
        return Err(format!("kkt violation {} (sum alpha y = {eq})", d.max_kkt_violation));
    }
    if d.duality_gap < -tol || d.duality_gap > tol * scale {
        return Err(format!("duality gap {}", d.duality_gap));
    }
    if d.slacks.iter().any(|s| *s < 0.0) {
        return Err("negative slack".into());
    }
    let re = check_kkt(&m, &ds).map_err(|e| e.to_string())?;
    if (re.duality_gap - d.duality_gap).abs() > 1e-9 * (1.0 + d.primal_objective.abs()) {
        return Err(format!("recomputed gap {} vs {}", re.duality_gap, d.duality_gap));
    }

    let qp = DualProblem::new(&ds, |a, b| rbf(gamma, a, b), p);
    let mu = qp.strong_convexity();
    let exact = qp.active_set_optimum();
    let f_exact = qp.objective(&exact);
    let f_smo = qp.objective(alpha);
    if (f_smo + d.dual_objective).abs() > 1e-9 * (1.0 + f_smo.abs()) {
        return Err(format!("objective {f_smo} disagrees with reported dual {}", d.dual_objective));
    }
    if f_smo - f_exact > d.duality_gap.max(0.0) + 1e-12 {
        return Err(format!("suboptimality {} exceeds the gap", f_smo - f_exact));
    }
    let bound_smo = (2.0 * (f_smo - f_exact).max(0.0) / mu).sqrt();
    if l2_diff(&exact, alpha) > bound_smo + 1e-8 {
        return Err(format!("distance to exact optimum {} > {bound_smo}", l2_diff(&exact, alpha)));
    }
    let (f_grid, grid) = qp.zoom_grid(1e-3);
    // the lattice point may sit a few spacings off a thin feasible slice
    if f_grid < f_exact - 1e-12 || max_abs_diff(&grid, &exact) > 3e-3 {
        return Err(format!("grid oracle {grid:?} vs exact {exact:?}"));
    }
    let bound_grid = (2.0 * (f_grid - f_exact) / mu).sqrt();
    if l2_diff(&grid, alpha) > bound_grid + bound_smo + 1e-8 {
        return Err(format!(
            "grid oracle distance {} > {}",
            l2_diff(&grid, alpha),
            bound_grid + bound_smo
        ));
    }
    Ok(())
}

fn decision_values(m: &implied_svm::kernel_svm::SvmModel, ds: &Dataset) -> Vec<f64> {
    ds.rows().map(|x| m.decision_value(x).unwrap()).collect()
}

/// Negated labels with swapped penalties give negated decision values.
pub fn label_flip_case(r: &mut ChaCha8Rng, tol: f64) -> Result<f64, String> {
    use implied_svm::kernel_svm::{train_weighted_svm, KernelSpec};
    let n = r.random_range(6..40);
    let ds = random_dataset(r, n, 3);
    let kernel = if r.random_bool(0.5) { KernelSpec::Linear } else { KernelSpec::Rbf { gamma: 0.7 } };
    let p = PenaltyConfig::new(r.random_range(0.1..10.0), r.random_range(0.1..10.0)).unwrap();
    let (m, _) = train_weighted_svm(&ds, kernel, p, tol, 10_000_000).map_err(|e| e.to_string())?;
    let (mf, _) =
        train_weighted_svm(&ds.with_flipped_labels(), kernel, p.swapped(), tol, 10_000_000).map_err(|e| e.to_string())?;
    let worst = decision_values(&m, &ds)
        .iter()
        .zip(decision_values(&mf, &ds))
        .map(|(a, b)| (a + b).abs())
        .fold(0.0, f64::max);
    if worst > 10.0 * tol {
        return Err(format!("flipped decisions differ by {worst}"));
    }
    Ok(worst)
}

/// Penalty 5 on the data equals penalty 1 on five copies of every row.
pub fn duplication_case(r: &mut ChaCha8Rng, tol: f64) -> Result<f64, String> {
    use implied_svm::kernel_svm::{train_weighted_svm, KernelSpec};
    let n = r.random_range(6..25);
    let ds = random_dataset(r, n, 2);
    let kernel = if r.random_bool(0.5) { KernelSpec::Linear } else { KernelSpec::Rbf { gamma: 1.5 } };
    let five = PenaltyConfig::symmetric(5.0).unwrap();
    let one = PenaltyConfig::symmetric(1.0).unwrap();
    let (m5, _) = train_weighted_svm(&ds, kernel, five, tol, 10_000_000).map_err(|e| e.to_string())?;
    let (m1, _) = train_weighted_svm(&ds.with_repeated_rows(5), kernel, one, tol, 10_000_000).map_err(|e| e.to_string())?;
    let worst = decision_values(&m5, &ds)
        .iter()
        .zip(decision_values(&m1, &ds))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if worst > 10.0 * tol {
        return Err(format!("duplicated decisions differ by {worst}"));
    }
    Ok(worst)
}
