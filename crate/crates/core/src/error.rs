use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("map has no nodes")]
    EmptyMap,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("unknown word `{0}`")]
    UnknownWord(String),

    #[error("unknown phoneme symbol `{0}`")]
    UnknownPhoneme(String),

    #[error("unknown object `{0}`")]
    UnknownObject(String),

    #[error("the context network has no committed groups")]
    NoGroups,

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("degenerate sample: {0}")]
    Degenerate(String),

    #[error("infeasible schedule: {0}")]
    Infeasible(String),

    #[error("malformed input: {0}")]
    Malformed(String),

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
    pub(crate) fn parse(path: impl Into<String>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad input data or configuration files,
    /// as opposed to failures during a computation.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::UnknownWord(_)
                | Error::UnknownPhoneme(_)
                | Error::UnknownObject(_)
                | Error::InvalidParam(_)
                | Error::Io { .. }
                | Error::Json(_)
                | Error::Malformed(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
