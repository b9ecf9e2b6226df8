use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A row of an input file could not be parsed.
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },

    /// Input violates a documented precondition.
    #[error("invalid input: {0}")]
    Validation(String),

    /// The metric has no value for this input (empty layer, zero entropy, ...).
    #[error("undefined metric: {0}")]
    Undefined(String),

    /// A computed value fell outside its mathematical range.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn undefined(msg: impl Into<String>) -> Self {
        Error::Undefined(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn is_undefined(&self) -> bool {
        matches!(self, Error::Undefined(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
