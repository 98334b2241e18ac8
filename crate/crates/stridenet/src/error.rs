//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced by the stridenet pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Tensor or layer dimensions do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// An argument violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A statistic is undefined for the given data (zero variance, empty set, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A non-finite value showed up where finite arithmetic is required.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// A file failed to parse; `line` is 1-based and 0 when unknown.
    #[error("parse error in {path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: u64,
        msg: String,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }
}

pub(crate) fn shape(msg: impl Into<String>) -> Error {
    Error::shape(msg)
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::invalid(msg)
}

pub(crate) fn degenerate(msg: impl Into<String>) -> Error {
    Error::degenerate(msg)
}
