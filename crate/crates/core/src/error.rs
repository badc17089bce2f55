use thiserror::Error;

/// Errors raised by the divergence, model and bound routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("unsupported configuration: {0}")]
    Config(String),

    #[error("out of scope: {0}")]
    Scope(String),
}

pub type Result<T> = std::result::Result<T, Error>;
