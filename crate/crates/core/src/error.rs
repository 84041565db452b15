use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid arc: {0}")]
    InvalidArc(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A resource guard refused the request; `limit` names the bound.
    #[error("refused: {what} exceeds the limit {limit}")]
    Guard { what: String, limit: String },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("bound not certified at d={d}: {reason}")]
    NotCertified { d: u64, reason: String },

    #[error("extraction failed: {0}")]
    Extraction(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn guard(what: impl Into<String>, limit: impl ToString) -> Self {
        Error::Guard {
            what: what.into(),
            limit: limit.to_string(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
