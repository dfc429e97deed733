use crate::error::{Error, Result};

/// Non-decreasing right-continuous step function.
///
/// `values[k]` holds on `[breakpoints[k], breakpoints[k + 1])`; the first
/// value extends to the left and the last to the right.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
}

impl StepFunction {
    pub fn eval(&self, x: f64) -> f64 {
        let k = self.breakpoints.partition_point(|b| *b <= x);
        self.values[k.saturating_sub(1)]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
struct Block {
    start: f64,
    sum: f64,
    weight: f64,
}

impl Block {
    fn mean(&self) -> f64 {
        self.sum / self.weight
    }
}

/// Least-squares isotonic (non-decreasing) fit of `targets` against
/// `scores` by pool-adjacent-violators. Equal scores are pooled first so
/// the fit is a function of the score.
pub fn fit_isotonic(scores: &[f64], targets: &[f64]) -> Result<StepFunction> {
    if scores.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: scores.len(),
            actual: targets.len(),
        });
    }
    if scores.is_empty() {
        return Err(Error::invalid("isotonic regression needs at least one point"));
    }
    if scores.iter().chain(targets).any(|v| !v.is_finite()) {
        return Err(Error::invalid("isotonic regression needs finite inputs"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| scores[i].total_cmp(&scores[j]));

    let mut blocks: Vec<Block> = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        let mut block = Block {
            start: s,
            sum: 0.0,
            weight: 0.0,
        };
        while i < order.len() && scores[order[i]] == s {
            block.sum += targets[order[i]];
            block.weight += 1.0;
            i += 1;
        }
        while let Some(prev) = blocks.last() {
            if prev.mean() < block.mean() {
                break;
            }
            let prev = blocks.pop().expect("non-empty");
            block = Block {
                start: prev.start,
                sum: prev.sum + block.sum,
                weight: prev.weight + block.weight,
            };
        }
        blocks.push(block);
    }
    Ok(StepFunction {
        breakpoints: blocks.iter().map(|b| b.start).collect(),
        values: blocks.iter().map(Block::mean).collect(),
    })
}
