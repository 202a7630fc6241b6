use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] loeve_core::Error),

    #[error("configuration error: {0}")]
    Config(String),

    /// An input produced by an earlier stage is absent.
    #[error("missing {} (run `loeve {command}` first)", path.display())]
    MissingStage { path: PathBuf, command: &'static str },

    #[error("I/O error on {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("image encoding failed for {}: {message}", path.display())]
    Image { path: PathBuf, message: String },

    /// `validate --strict` found failing checks.
    #[error("{0} validation check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    /// 2 for invalid input or configuration, 3 for I/O, 4 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        use loeve_core::Error as E;
        match self {
            CliError::Core(E::Io(_)) | CliError::Io { .. } | CliError::Image { .. } => 3,
            CliError::Core(E::Numerical(_)) | CliError::ChecksFailed(_) => 4,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
