use std::io;
use std::path::PathBuf;

use cascade_core::ErrorKind;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid parameter `{key}`: {reason}")]
    Param { key: String, reason: String },

    #[error("{}:{line}: {reason}", path.display())]
    ConfigFile { path: PathBuf, line: usize, reason: String },

    #[error(transparent)]
    Core(#[from] cascade_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub(crate) fn param(key: &str, reason: impl Into<String>) -> Self {
        CliError::Param { key: key.to_owned(), reason: reason.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 2 for configuration problems, 3 for numeric or fit failures, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Param { .. } | CliError::ConfigFile { .. } => 2,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Config => 2,
                ErrorKind::Numeric => 3,
            },
            CliError::Io { .. } => 4,
        }
    }
}
