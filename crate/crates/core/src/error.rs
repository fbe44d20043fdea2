use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("state dimension must be at least 1")]
    EmptyState,

    #[error("amplitude {index} is not finite")]
    NonFinite { index: usize },

    #[error("state is not normalized: squared norm {norm_sq} (pass renormalize to accept)")]
    NotNormalized { norm_sq: f64 },

    #[error("cannot renormalize a zero vector")]
    ZeroVector,

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("ensemble size must be at least 1")]
    EmptyEnsemble,

    #[error(
        "{what}: {dim}^{n} basis states exceeds the limit of {limit}; use the analytic engine"
    )]
    ScaleExceeded {
        what: &'static str,
        dim: usize,
        n: usize,
        limit: usize,
    },

    #[error("ensemble size {n} exceeds the spectral-weight limit of {limit}")]
    WeightOverflow { n: usize, limit: usize },

    #[error("operator has dimension {actual}, expected {expected}")]
    OperatorMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
