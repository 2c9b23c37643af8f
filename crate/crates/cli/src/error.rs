use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {origin}: {message}")]
    Parse { origin: String, message: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("{0} reference target(s) failed")]
    TargetsFailed(usize),

    #[error(transparent)]
    Core(#[from] toric_tee::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Parse { .. } => 1,
            CliError::Validation(_) | CliError::Core(_) => 2,
            CliError::TargetsFailed(_) => 3,
        }
    }

    pub(crate) fn validation(at: &str, msg: impl std::fmt::Display) -> Self {
        CliError::Validation(format!("{at}: {msg}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
