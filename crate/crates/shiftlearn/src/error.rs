use std::path::PathBuf;

use thiserror::Error;

/// Errors of the std front end. Each maps onto one process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Data { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] shiftlearn_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} month(s) stayed infeasible after full relaxation")]
    Infeasible(usize),
}

impl CliError {
    pub fn data(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        CliError::Data {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 infeasible after full relaxation, 3 configuration, 4 data.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Infeasible(_) => 2,
            CliError::Config(_) => 3,
            CliError::Data { .. } | CliError::Core(_) | CliError::Io { .. } => 4,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
