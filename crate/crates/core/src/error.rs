use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("index {index} outside [1, {n}]")]
    OutOfRange { index: usize, n: usize },

    #[error("indices {u} and {v} are neither equal nor consecutive")]
    NonConsecutive { u: usize, v: usize },

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("ambient dimension mismatch: expected {expected}, found {found}")]
    AmbientMismatch { expected: usize, found: usize },

    #[error("ambient dimension {0} unsupported (must be in [1, 64])")]
    AmbientTooLarge(usize),

    #[error("invalid factorization: {0}")]
    InvalidFactorization(String),

    #[error("dimension {n} exceeds the limit {limit} for this operation")]
    DimensionTooLarge { n: usize, limit: usize },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("query outside decidable scope: {0}")]
    OutOfScope(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}
