use thiserror::Error;

/// Errors raised by the simulation and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BornError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("efficiency is singular at gamma = 0")]
    SingularThreshold,

    #[error("outcome enumeration needs 2^{d} entries; limit is d = {max}")]
    EnumerationLimit { d: usize, max: usize },

    #[error("undefined conditional probability: {0}")]
    UndefinedConditional(String),

    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),

    #[error("detector on mode {0} is saturated (crossing probability is 1)")]
    SaturatedDetector(usize),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("not unitary: residual {0:e}")]
    NotUnitary(f64),

    #[error("cannot factor dimension {d} as {d_a} x {d_b}")]
    Factorization { d: usize, d_a: usize, d_b: usize },

    #[error("circuit: {0}")]
    Circuit(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, BornError>;

impl From<std::io::Error> for BornError {
    fn from(e: std::io::Error) -> Self {
        BornError::Io(e.to_string())
    }
}

impl From<csv::Error> for BornError {
    fn from(e: csv::Error) -> Self {
        BornError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for BornError {
    fn from(e: serde_json::Error) -> Self {
        BornError::Io(e.to_string())
    }
}
