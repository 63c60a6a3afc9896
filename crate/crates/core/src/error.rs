use thiserror::Error;

/// Errors raised by the engine. Hypothesis violations carry the quoted condition.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("exponent contexts differ")]
    ContextMismatch,
    #[error("series is not a unit: {0}")]
    NonUnit(String),
    #[error("point is singular for walls {walls:?}")]
    Singular { walls: Vec<usize> },
    #[error("non-transverse crossing of wall {0}")]
    NonTransverse(usize),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
