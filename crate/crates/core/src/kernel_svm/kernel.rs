use std::num::NonZeroUsize;
use std::sync::Arc;

use lru::LruCache;

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Datasets up to this size get a full dense Gram matrix; larger ones use
/// [`RowCache`].
pub const DENSE_GRAM_LIMIT: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    Linear,
    Rbf { gamma: f64 },
}

impl KernelSpec {
    pub fn rbf(gamma: f64) -> Result<Self> {
        let k = KernelSpec::Rbf { gamma };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Rbf { gamma } if !(gamma > 0.0 && gamma.is_finite()) => {
                Err(Error::invalid(format!("rbf gamma must be positive and finite, got {gamma}")))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                actual: y.len(),
            });
        }
        Ok(self.eval_unchecked(x, y))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            KernelSpec::Linear => x.iter().zip(y).map(|(a, b)| a * b).sum(),
            KernelSpec::Rbf { gamma } => {
                let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                (-gamma * d2).exp()
            }
        }
    }
}

/// Row access to the kernel matrix of a training set.
pub(crate) trait KernelRows {
    fn len(&self) -> usize;
    fn diag(&self, i: usize) -> f64;
    fn with_rows<R>(&mut self, i: usize, j: usize, f: impl FnOnce(&[f64], &[f64]) -> R) -> R;
}

/// Full kernel matrix, computed once and shareable between solver runs on
/// the same data.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    n: usize,
    kernel: KernelSpec,
    values: Vec<f64>,
}

impl GramMatrix {
    pub fn compute(ds: &Dataset, kernel: KernelSpec) -> Result<Self> {
        kernel.validate()?;
        let n = ds.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let k = kernel.eval_unchecked(ds.row(i), ds.row(j));
                values[i * n + j] = k;
                values[j * n + i] = k;
            }
        }
        Ok(Self { n, kernel, values })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

impl KernelRows for &GramMatrix {
    fn len(&self) -> usize {
        self.n
    }

    fn diag(&self, i: usize) -> f64 {
        self.get(i, i)
    }

    fn with_rows<R>(&mut self, i: usize, j: usize, f: impl FnOnce(&[f64], &[f64]) -> R) -> R {
        f(self.row(i), self.row(j))
    }
}

/// Least-recently-used cache of kernel rows for training sets too large
/// for a dense Gram matrix.
pub struct RowCache<'a> {
    ds: &'a Dataset,
    kernel: KernelSpec,
    diag: Vec<f64>,
    rows: LruCache<usize, Arc<[f64]>>,
}

impl<'a> RowCache<'a> {
    /// `capacity` is the number of rows kept; at least 2.
    pub fn new(ds: &'a Dataset, kernel: KernelSpec, capacity: usize) -> Self {
        let diag = ds.rows().map(|r| kernel.eval_unchecked(r, r)).collect();
        let capacity = NonZeroUsize::new(capacity.max(2)).expect("at least 2");
        Self {
            ds,
            kernel,
            diag,
            rows: LruCache::new(capacity),
        }
    }

    /// Capacity derived from a memory budget in bytes.
    pub fn with_budget(ds: &'a Dataset, kernel: KernelSpec, bytes: usize) -> Self {
        let row_bytes = ds.len().max(1) * std::mem::size_of::<f64>();
        Self::new(ds, kernel, bytes / row_bytes)
    }

    pub fn cached_rows(&self) -> usize {
        self.rows.len()
    }

    fn fetch(&mut self, i: usize) -> Arc<[f64]> {
        let (ds, kernel) = (self.ds, self.kernel);
        Arc::clone(self.rows.get_or_insert(i, || {
            let xi = ds.row(i);
            ds.rows().map(|xj| kernel.eval_unchecked(xi, xj)).collect()
        }))
    }
}

impl KernelRows for RowCache<'_> {
    fn len(&self) -> usize {
        self.ds.len()
    }

    fn diag(&self, i: usize) -> f64 {
        self.diag[i]
    }

    fn with_rows<R>(&mut self, i: usize, j: usize, f: impl FnOnce(&[f64], &[f64]) -> R) -> R {
        let ri = self.fetch(i);
        let rj = self.fetch(j);
        f(&ri, &rj)
    }
}
