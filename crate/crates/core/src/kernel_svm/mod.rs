//! Class-weighted soft-margin SVMs: kernels, the SMO dual solver, trained
//! models and their text format.

mod kernel;
mod model;
mod smo;

pub use kernel::{GramMatrix, KernelSpec, RowCache, DENSE_GRAM_LIMIT};
pub use model::{classify_value, Classification, PenaltyConfig, SupportVector, SvmModel, DEFAULT_EPS_ON_PLANE};
pub(crate) use model::write_vector;
pub use smo::{check_kkt, train_weighted_svm, train_with_gram, SolverDiagnostics, SolverOptions};
