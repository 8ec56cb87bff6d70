use std::path::PathBuf;

use thiserror::Error;

/// Failures surfaced by the command-line front end.
///
/// Exit codes: 1 for I/O and parse failures, 2 for domain and
/// infeasibility errors and invalid argument combinations.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("{path}: {rows}x{cols} exceeds the cell budget of {budget}")]
    TooLarge { path: PathBuf, rows: usize, cols: usize, budget: usize },
    #[error(transparent)]
    Domain(#[from] detlev::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot serialize output: {0}")]
    Serialize(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Io { .. } | Self::Parse { .. } | Self::TooLarge { .. } | Self::Serialize(_) => 1,
            Self::Domain(_) | Self::Usage(_) => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Self::Parse { path: path.into(), line, message: message.into() }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
