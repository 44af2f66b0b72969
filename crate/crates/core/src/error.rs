use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the analysis chain.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A token in an RR file could not be read as a number.
    #[error("line {line}: cannot parse {token:?} as a number")]
    Parse { line: usize, token: String },

    /// An input violated a documented precondition.
    #[error("invalid input: {0}")]
    Validation(String),

    /// Features could not be formed for a recording.
    #[error("feature extraction failed: {0}")]
    Feature(String),

    /// Statistic is undefined for the supplied data (e.g. zero error variance).
    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, err: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.into(),
            message: err.to_string(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
