use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid layout: {0}")]
    Layout(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("malformed game file: {0}")]
    Format(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("prox solver did not converge after {iterations} iterations (residual {residual:e})")]
    ProxNonConvergence { iterations: usize, residual: f64 },

    #[error("stationary distribution residual {residual:e} exceeds tolerance")]
    StationaryResidual { residual: f64 },

    #[error(
        "swap-function enumeration needs {candidates} candidates, above the cap of {cap}; \
         use the restricted lower-bound evaluation instead"
    )]
    EnumerationCap { candidates: f64, cap: u64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
