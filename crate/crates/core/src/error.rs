use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown node id {0}")]
    UnknownNode(usize),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    /// A hierarchy spec failed to parse or validate; `key` names the offending
    /// JSON key (with index where applicable).
    #[error("spec `{key}`: {message}")]
    Spec { key: String, message: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("probability out of range at {location}: {value}")]
    ProbabilityOutOfRange { location: String, value: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn spec(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Spec {
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by malformed input files or documents.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Spec { .. } | Error::Parse { .. } | Error::Json(_) | Error::Io { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
