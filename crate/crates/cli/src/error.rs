use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Core(#[from] cknsym_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("config {}: {source}", path.display())]
    Config {
        path: PathBuf,
        source: serde_json::Error,
    },

    #[error("minimizer stopped after {iterations} iterations without converging")]
    NonConvergence { iterations: usize },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use cknsym_core::Error as E;
        match self {
            CliError::Invalid(_) | CliError::Config { .. } => 2,
            CliError::Io { .. } => 3,
            CliError::NonConvergence { .. } => 4,
            CliError::Core(e) => match e {
                E::NonConvergence { .. } => 4,
                E::Inconsistent(_) | E::Eigen(_) => 1,
                _ => 2,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Invalid(msg.into()))
}
