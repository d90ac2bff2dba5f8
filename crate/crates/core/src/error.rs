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

    #[error("zero parseable records")]
    NoRecords,

    #[error("unknown category `{0}`")]
    UnknownCategory(String),

    #[error("unknown style `{0}`")]
    UnknownStyle(String),

    #[error("category `{0}` has zero total grain mass")]
    ZeroGrainMass(String),

    #[error("recipe `{0}` has no hop entries")]
    NoHops(String),

    #[error("original gravity {0} must exceed 1.000")]
    GravityOutOfRange(f64),

    #[error("non-finite value: {0}")]
    NonFinite(&'static str),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("insufficient data: {0}")]
    Insufficient(String),

    #[error("degenerate sample: {0}")]
    Degenerate(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("label mismatch between model and dissimilarity matrix")]
    LabelMismatch,

    #[error("rows `{0}` and `{1}` share no comparable feature")]
    NoComparableFeatures(String, String),

    #[error("invalid dissimilarity matrix: {0}")]
    InvalidMatrix(String),

    #[error("{what} = {value} out of range {range}")]
    OutOfRange {
        what: &'static str,
        value: usize,
        range: String,
    },

    #[error("malformed {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
