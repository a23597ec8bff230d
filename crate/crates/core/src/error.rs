use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "incomplete table: no `{measure}` score for algorithm `{algorithm}` on dataset `{dataset}`"
    )]
    IncompleteTable {
        dataset: String,
        algorithm: String,
        measure: String,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{path}:{line}: duplicate entry {key}")]
    DuplicateEntry {
        path: PathBuf,
        line: u64,
        key: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Short machine-readable tag for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::IncompleteTable { .. } => "IncompleteTable",
            Error::Parse { .. } => "ParseError",
            Error::DuplicateEntry { .. } => "DuplicateEntry",
            Error::Io { .. } => "IoError",
            Error::Json(_) => "JsonError",
        }
    }
}
