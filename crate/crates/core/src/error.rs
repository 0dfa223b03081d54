use thiserror::Error;

use crate::estimator::Regime;

/// Errors produced by the estimation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alpha must lie strictly inside (0, 1), got {0}")]
    InvalidAlpha(f64),

    #[error("invalid step schedule: {0}")]
    InvalidSchedule(String),

    #[error("non-finite {what}: {value}")]
    NonFinite { what: &'static str, value: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("schedule regime {0} has no theoretical constants")]
    UnsupportedRegime(Regime),

    #[error("invalid model parameter: {0}")]
    InvalidModel(String),

    #[error("{0}")]
    NotIntegrable(String),

    #[error("degenerate distribution: {0}")]
    Degenerate(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
