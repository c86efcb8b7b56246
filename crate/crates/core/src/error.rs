use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("panel is empty")]
    EmptyPanel,

    #[error("length mismatch: {f_len} estimates but {g_len} peer estimates")]
    LengthMismatch { f_len: usize, g_len: usize },

    #[error("judge labels: expected {expected}, got {got}")]
    LabelCount { expected: usize, got: usize },

    #[error("non-finite {field} at index {index}: {value}")]
    NonFinite {
        field: &'static str,
        index: usize,
        value: f64,
    },

    #[error("truth {truth} is not finite")]
    NonFiniteTruth { truth: f64 },

    #[error("truth {truth} outside [0, 1] for a unit-interval task")]
    TruthOutOfRange { truth: f64 },

    #[error("experiment set {name:?}: {reason}")]
    InvalidExperiment { name: String, reason: String },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("singular parameters: {0}")]
    Singularity(String),

    #[error("degenerate experiment set: {0}")]
    Degenerate(String),

    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable short name of the error class, used by the command line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyPanel
            | Error::LengthMismatch { .. }
            | Error::LabelCount { .. }
            | Error::NonFinite { .. }
            | Error::NonFiniteTruth { .. }
            | Error::TruthOutOfRange { .. }
            | Error::InvalidExperiment { .. } => "validation",
            Error::Parameter(_) => "parameter",
            Error::Singularity(_) => "singularity",
            Error::Degenerate(_) => "degenerate",
            Error::Parse { .. } => "parse",
            Error::Io { .. } => "io",
            Error::Csv(_) => "csv",
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
