use std::path::PathBuf;

use thiserror::Error;

/// Errors of a CLI run, each with its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("check failed: {0}")]
    Check(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(qpl_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Check(_) | CliError::Core(_) => 1,
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Capacity(_) => 3,
        }
    }
}

impl From<qpl_core::Error> for CliError {
    fn from(e: qpl_core::Error) -> Self {
        match e {
            qpl_core::Error::Capacity { .. } => CliError::Capacity(e.to_string()),
            other => CliError::Core(other),
        }
    }
}
