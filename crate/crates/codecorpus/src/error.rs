//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("shard {shard}: checksum mismatch (expected {expected}, got {actual})")]
    ChecksumMismatch {
        shard: String,
        expected: String,
        actual: String,
    },

    #[error("shard {shard}: missing checksum sidecar")]
    ChecksumMissing { shard: String },

    #[error("document {0}: content is not valid UTF-8")]
    NonUtf8(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("document {0} has no quality score")]
    Unscored(String),

    #[error("no rating pattern found in response")]
    RatingMissing,

    #[error("rating {0} is outside the 0..=10 range")]
    RatingOutOfRange(i64),

    #[error("oracle request failed after {attempts} attempts: {reason}")]
    OracleExhausted { attempts: u32, reason: String },

    #[error("oracle rejected authentication: {0}")]
    OracleAuth(String),

    #[error("no import rules registered for language {0}; use random packing")]
    NoImportRules(String),

    #[error("model file {path}: {reason}")]
    ModelFormat { path: PathBuf, reason: String },

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    /// Shorthand for precondition violations.
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
