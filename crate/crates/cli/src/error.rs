use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// The command was invoked wrongly: bad flag values or configuration.
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Data(#[from] wvc_core::Error),

    /// A data error tied to one input file.
    #[error("{}: {source}", path.display())]
    Input {
        path: PathBuf,
        #[source]
        source: wvc_core::Error,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) | CliError::Input { .. } | CliError::Io { .. } => 2,
        }
    }

    /// Attaches `path` to errors that do not already name a file.
    pub fn input(path: impl Into<PathBuf>) -> impl FnOnce(wvc_core::Error) -> Self {
        let path = path.into();
        move |source| match source {
            wvc_core::Error::Io { .. }
            | wvc_core::Error::UnsupportedFormat { .. }
            | wvc_core::Error::Malformed { .. } => CliError::Data(source),
            source => CliError::Input { path, source },
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
