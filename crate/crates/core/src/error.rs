use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("schema mismatch: {0}")]
    Schema(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("structural mismatch: {0}")]
    Structure(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A regression bin had too few points or no spread in the predictor.
    #[error("singular fit: {0}")]
    Singular(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Coarse failure classes, used for CLI exit codes and FFI status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Io,
    Schema,
    Precondition,
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Io { .. } => ErrorClass::Io,
            Error::Parse(_)
            | Error::Schema(_)
            | Error::Empty(_)
            | Error::Json(_)
            | Error::Csv(_) => ErrorClass::Schema,
            Error::UnknownVariable(_)
            | Error::Structure(_)
            | Error::Precondition(_)
            | Error::Singular(_) => ErrorClass::Precondition,
        }
    }
}
