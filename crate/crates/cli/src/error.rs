use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] delaychain::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 1 usage, 2 data, 3 calibration.
    pub fn exit_code(&self) -> i32 {
        use delaychain::Error as E;
        match self {
            CliError::Usage(_) => 1,
            CliError::Io { .. } => 2,
            CliError::Core(e) if e.is_calibration() => 3,
            CliError::Core(E::Build(_)) => 3,
            CliError::Core(_) => 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
        assert_eq!(CliError::from(delaychain::Error::Parse { row: 1, message: "x".into() }).exit_code(), 2);
        assert_eq!(
            CliError::from(delaychain::Error::PoolExhausted { usable: 1, needed: 2 }).exit_code(),
            3
        );
        assert_eq!(CliError::from(delaychain::Error::Calibration("x".into())).exit_code(), 3);
        assert_eq!(CliError::from(delaychain::Error::Capacity("x".into())).exit_code(), 2);
    }
}
