use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{nodes} nodes per axis exceeds the cap of {cap}")]
    GridTooLarge { nodes: usize, cap: usize },

    #[error("experiment `{experiment}` requires {hypothesis}; got {got}")]
    HypothesisViolated {
        experiment: String,
        hypothesis: String,
        got: String,
    },

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("experiment namespace `{0}` is reserved but has no implementation")]
    ReservedExperiment(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}
