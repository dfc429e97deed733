use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    /// `(false positive rate, true positive rate)` from `(0, 0)` to `(1, 1)`.
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

pub(crate) fn check_indicators(labels01: &[f64]) -> Result<(usize, usize)> {
    let mut pos = 0;
    for (i, l) in labels01.iter().enumerate() {
        if *l == 1.0 {
            pos += 1;
        } else if *l != 0.0 {
            return Err(Error::invalid(format!("label {i} is {l}, expected 0 or 1")));
        }
    }
    Ok((pos, labels01.len() - pos))
}

/// Threshold sweep from the highest score down; equal scores form one step.
pub fn roc_and_auc(scores: &[f64], labels01: &[f64]) -> Result<RocCurve> {
    if scores.len() != labels01.len() {
        return Err(Error::DimensionMismatch {
            expected: labels01.len(),
            actual: scores.len(),
        });
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::invalid("ROC needs finite scores"));
    }
    let (n_pos, n_neg) = check_indicators(labels01)?;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass {
            n_plus: n_pos,
            n_minus: n_neg,
        });
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| scores[j].total_cmp(&scores[i]));

    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut auc = 0.0;
    let mut k = 0;
    while k < order.len() {
        let s = scores[order[k]];
        while k < order.len() && scores[order[k]] == s {
            if labels01[order[k]] == 1.0 {
                tp += 1;
            } else {
                fp += 1;
            }
            k += 1;
        }
        let next = (fp as f64 / n_neg as f64, tp as f64 / n_pos as f64);
        let (x0, y0) = *points.last().expect("starts at origin");
        auc += (next.0 - x0) * (y0 + next.1) * 0.5;
        points.push(next);
    }
    Ok(RocCurve { points, auc })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_separation() {
        let r = roc_and_auc(&[0.1, 0.2, 0.8, 0.9], &[0.0, 0.0, 1.0, 1.0]).unwrap();
        assert_eq!(r.auc, 1.0);
        assert_eq!(r.points.first(), Some(&(0.0, 0.0)));
        assert_eq!(r.points.last(), Some(&(1.0, 1.0)));
    }

    #[test]
    fn one_discordant_pair() {
        let r = roc_and_auc(&[0.1, 0.4, 0.35, 0.8], &[0.0, 0.0, 1.0, 1.0]).unwrap();
        assert!((r.auc - 0.75).abs() < 1e-15);
    }

    #[test]
    fn ties_give_diagonal_step() {
        let r = roc_and_auc(&[0.5, 0.5], &[0.0, 1.0]).unwrap();
        assert_eq!(r.points, vec![(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(r.auc, 0.5);
    }

    #[test]
    fn errors() {
        assert!(roc_and_auc(&[0.1, 0.2], &[1.0, 1.0]).is_err());
        assert!(roc_and_auc(&[0.1, 0.2], &[1.0, 2.0]).is_err());
        assert!(roc_and_auc(&[0.1], &[1.0, 0.0]).is_err());
    }
}
