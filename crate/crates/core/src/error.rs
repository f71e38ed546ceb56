use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed schema: {0}")]
    Schema(String),

    #[error("hyperparameter #{position} `{name}`: duplicate name")]
    DuplicateHp { position: usize, name: String },

    #[error("hyperparameter #{position} `{name}`: empty value list")]
    EmptyValues { position: usize, name: String },

    #[error("hyperparameter #{position} `{name}`: value #{value_position} ({value}) {reason}")]
    BadGridValue {
        position: usize,
        name: String,
        value_position: usize,
        value: String,
        reason: &'static str,
    },

    #[error("search space has more than 2^64 configurations")]
    SpaceTooLarge,

    #[error("evaluations: {0}")]
    Csv(String),

    #[error("evaluations: missing column `{0}`")]
    MissingColumn(String),

    #[error("evaluations row {row}, column `{column}`: value `{value}` is not on the declared grid")]
    OffGrid {
        row: usize,
        column: String,
        value: String,
    },

    #[error("evaluations row {row}, column `{column}`: missing loss")]
    MissingLoss { row: usize, column: String },

    #[error("evaluations row {row}, column `{column}`: loss `{value}` is not a finite number")]
    NonFiniteLoss {
        row: usize,
        column: String,
        value: String,
    },

    #[error("evaluations row {row}: duplicate configuration (first seen in row {first})")]
    DuplicateConfiguration { row: usize, first: usize },

    #[error("configuration {0:?} does not belong to the search space")]
    NotInSpace(Vec<u32>),

    #[error("landscape has no nodes")]
    EmptyLandscape,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph export: {0}")]
    GraphExport(String),

    #[error("json: {0}")]
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
