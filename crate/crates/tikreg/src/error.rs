//! Crate-wide error type.

/// Errors produced by solvers, linear-system backends, and data loading.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input vector or matrix contained a NaN or infinity.
    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },

    /// Invalid problem configuration (non-positive lambda or mu, shape mismatch, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A Cholesky factorization hit a non-positive or non-finite pivot.
    #[error("{strategy}: factorization failed at pivot {index} (matrix not positive definite)")]
    Factorization { strategy: &'static str, index: usize },

    /// Backtracking line search exhausted its budget without sufficient decrease.
    #[error("line search failed to find sufficient decrease after {backtracks} backtracks")]
    LineSearch { backtracks: usize },

    /// A text data file could not be parsed; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// The exhaustive grid oracle only handles very small dimensions.
    #[error("grid oracle supports n <= 3, got n = {0}")]
    UnsupportedSize(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
