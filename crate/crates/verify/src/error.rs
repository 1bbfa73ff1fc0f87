use thiserror::Error;

use taut_core::error::TautError;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("dimension cap exceeded: requested {requested}, cap {cap}")]
    DimensionCap { requested: usize, cap: usize },
    #[error("cache version mismatch: file has {found:?}, this build reads {expected:?}")]
    CacheVersion { found: String, expected: String },
    #[error("cache error: {0}")]
    Cache(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("report serialization: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Taut(#[from] TautError),
}

pub type Result<T> = std::result::Result<T, VerifyError>;
