use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("sample is empty")]
    EmptySample,

    #[error("insufficient data: need at least {needed} {unit}, got {got}")]
    InsufficientData {
        needed: usize,
        got: usize,
        unit: &'static str,
    },

    #[error("degenerate sequence: {0}")]
    DegenerateSequence(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("{source_name}:{line}: {message}")]
    Validation {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("confusion cell is empty")]
    EmptyCell,

    #[error("metric undefined: {0}")]
    UndefinedMetric(&'static str),

    #[error("run result is empty")]
    EmptyRun,

    #[error("serialization: {0}")]
    Serialization(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn bytes_needed(needed: usize, got: usize) -> Self {
        Error::InsufficientData {
            needed,
            got,
            unit: "bytes",
        }
    }

    pub(crate) fn bits_needed(needed: usize, got: usize) -> Self {
        Error::InsufficientData {
            needed,
            got,
            unit: "bits",
        }
    }
}
