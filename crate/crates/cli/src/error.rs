use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("column {column:?} not found; available: {}", available.join(", "))]
    MissingColumn { column: String, available: Vec<String> },

    /// `row` counts data rows from 1, header excluded.
    #[error("row {row}: {reason}")]
    Row { row: usize, reason: String },

    #[error("need at least two prices, found {0}")]
    TooFewPrices(usize),

    #[error("date-based sampling needs a date column whose values parse as YYYY-MM-DD")]
    NotDated,

    #[error("unknown preset {name:?}; valid presets: {}", valid.join(", "))]
    UnknownPreset { name: String, valid: Vec<&'static str> },

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Core(#[from] sqstream::Error),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}
