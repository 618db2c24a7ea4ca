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

    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("invalid value: {0}")]
    Validation(String),

    #[error("insufficient capacity: {0}")]
    Capacity(String),

    #[error("neuron pool exhausted: {usable} usable neurons, {needed} required")]
    PoolExhausted { usable: usize, needed: usize },

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("network build failed: {0}")]
    Build(String),

    #[error("structural mismatch: {0}")]
    Structural(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures that originate in neuron calibration rather than input data.
    pub fn is_calibration(&self) -> bool {
        matches!(self, Error::Calibration(_) | Error::PoolExhausted { .. })
    }
}
