use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse: {path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("embeddings: {path}:{line}: expected {expected} components, found {found}")]
    Dimension {
        path: PathBuf,
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("embeddings: {path}:{line}: zero vector rejected for word {word:?}")]
    ZeroVector {
        path: PathBuf,
        line: usize,
        word: String,
    },

    #[error("duplicate {kind} id {id:?}")]
    Duplicate { kind: &'static str, id: String },

    #[error("validation: {0}")]
    Validation(String),

    #[error("domain: {0}")]
    Domain(String),

    #[error("lookup: {0}")]
    Lookup(String),

    #[error("index: incompatible format version {found:?} (expected {expected:?})")]
    Incompatible { found: String, expected: String },

    #[error("index: corrupt or missing data: {0}")]
    Corrupt(String),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
