use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("not a permutation: {0:?}")]
    NotBijection(Vec<usize>),
    #[error("mode mismatch")]
    ModeMismatch,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("requires pointed mode")]
    NeedsPointed,
    #[error("bound exceeded: {0}")]
    Bound(String),
    #[error("structural validation failed: {0}")]
    Validation(String),
    #[error("not sigma-free: {0}")]
    NotSigmaFree(String),
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}

/// Deserializes `v`, reporting failures at their JSON path below `at`.
pub(crate) fn decode<T: serde::de::DeserializeOwned>(v: &serde_json::Value, at: &str) -> Result<T> {
    serde_path_to_error::deserialize(v.clone()).map_err(|e| {
        let inner = e.path().to_string();
        let path = match inner.as_str() {
            "." => at.to_string(),
            i if i.starts_with('[') => format!("{at}{i}"),
            i => format!("{at}.{i}"),
        };
        Error::Schema { path, message: e.into_inner().to_string() }
    })
}
