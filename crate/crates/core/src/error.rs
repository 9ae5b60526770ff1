use thiserror::Error;

/// Every failure mode of the simulator.
///
/// Variants fall into two families that the command-line front end maps to
/// different exit codes: input problems (everything except `Numeric` and
/// `Capacity`) and numerical breakdowns.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix dimension {requested} exceeds the supported maximum {max}")]
    Capacity { requested: usize, max: usize },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("numerical failure after {iterations} iterations: {message}")]
    Numeric { message: String, iterations: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("out of range: {0}")]
    Range(String),

    #[error("unsupported state shape: {0}")]
    UnsupportedShape(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>, iterations: usize) -> Self {
        Error::Numeric {
            message: msg.into(),
            iterations,
        }
    }

    /// True for breakdowns of the numerics rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Numeric { .. } | Error::Capacity { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
