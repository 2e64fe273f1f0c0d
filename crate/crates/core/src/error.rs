use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the model, inference, ingestion and experiment layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    Dimension {
        what: String,
        expected: usize,
        got: usize,
    },

    #[error("invalid value for {what}: {reason}")]
    InvalidValue { what: String, reason: String },

    #[error("{file}:{line}: {reason}")]
    Schema {
        file: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("zero variance: cannot z-score {what}")]
    ZeroVariance { what: String },

    #[error("media series does not cover {what}")]
    Coverage { what: String },

    #[error("non-finite gradient at coordinate {index}")]
    NonFiniteGradient { index: usize },

    #[error("all {} restarts diverged: {}", .diagnostics.len(), .diagnostics.join("; "))]
    Diverged { diagnostics: Vec<String> },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn dim(what: impl Into<String>, expected: usize, got: usize) -> Self {
        Error::Dimension {
            what: what.into(),
            expected,
            got,
        }
    }

    pub(crate) fn invalid(what: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidValue {
            what: what.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad inputs rather than a failed fit.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Diverged { .. } | Error::NonFiniteGradient { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
