use std::path::PathBuf;

use thiserror::Error;

use crate::classify::format::FormatError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: unsupported format: {reason}", path.display())]
    UnsupportedFormat { path: PathBuf, reason: String },

    #[error("{}: malformed file: {reason}", path.display())]
    Malformed { path: PathBuf, reason: String },

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("image {width}x{height} is too small: {reason}")]
    TooSmall {
        width: usize,
        height: usize,
        reason: String,
    },

    #[error("manifest: {0}")]
    Manifest(String),

    #[error("patch side {side} fits no scale of any training image")]
    PatchNeverFits { side: usize },

    #[error("no non-zero {side}x{side} patch found after {attempts} draws")]
    RetriesExhausted { side: usize, attempts: usize },

    #[error("{what} width mismatch: model expects {expected}, got {found}")]
    WidthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("cannot form {k} clusters from {points} points")]
    TooFewPoints { k: usize, points: usize },

    #[error("non-finite state encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("scenario: {0}")]
    Scenario(String),

    #[error(transparent)]
    Format(#[from] FormatError),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
