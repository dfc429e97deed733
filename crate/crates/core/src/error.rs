use std::path::PathBuf;

use thiserror::Error;

use crate::kernel_svm::SolverDiagnostics;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{location}: {message}")]
    Parse { location: String, message: String },

    #[error("invalid dataset: {0}")]
    InvalidData(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("training set must contain both classes (n+ = {n_plus}, n- = {n_minus})")]
    SingleClass { n_plus: usize, n_minus: usize },

    #[error(
        "solver did not converge after {} pair updates (max KKT violation {:.3e})",
        .diagnostics.iterations,
        .diagnostics.max_kkt_violation
    )]
    NonConvergence { diagnostics: Box<SolverDiagnostics> },

    #[error("grid level {level}: {source}")]
    GridLevel {
        level: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into())
    }

    /// True when the root cause is a solver that ran out of iterations.
    pub fn is_non_convergence(&self) -> bool {
        match self {
            Error::NonConvergence { .. } => true,
            Error::GridLevel { source, .. } => source.is_non_convergence(),
            _ => false,
        }
    }
}
