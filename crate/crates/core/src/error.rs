use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix dimension must be at least 1")]
    ZeroDimension,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("matrix set must contain at least one matrix")]
    EmptySet,

    #[error("matrix is singular or too ill-conditioned (condition number {condition:e})")]
    Singular { condition: f64 },

    #[error("node budget of {budget} exhausted after visiting {visited} nodes")]
    BudgetExceeded { budget: usize, visited: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}
