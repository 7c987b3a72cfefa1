use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed header in {path}: {reason}")]
    MalformedHeader { path: PathBuf, reason: String },

    #[error("block {name} has dim {found}, canonical dim is {expected}")]
    DimMismatch {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("block name mismatch: expected {expected}, file declares {found}")]
    NameMismatch { expected: String, found: String },

    #[error("non-finite value in block {name} at row {row}, column {col}")]
    NonFinite {
        name: String,
        row: usize,
        col: usize,
    },

    #[error("row count mismatch in {context}: expected {expected}, found {found}")]
    RowCount {
        context: String,
        expected: usize,
        found: usize,
    },

    #[error("checksum mismatch in {path}: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum {
        path: PathBuf,
        stored: u32,
        computed: u32,
    },

    #[error("block {name}: feature file {path} not found")]
    MissingBlock { name: String, path: PathBuf },

    #[error("invalid manifest {path}: {reason}")]
    Manifest { path: PathBuf, reason: String },

    #[error("length mismatch in {context}: {left} vs {right}")]
    LengthMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },

    #[error("empty input to {0}")]
    Empty(&'static str),

    #[error("training labels contain a single class")]
    SingleClass,

    #[error("correlation undefined: {0} has zero variance")]
    ZeroVariance(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("round {round}, fold {fold}: {source}")]
    Fold {
        round: usize,
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
