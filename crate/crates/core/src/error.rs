use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{file}:{line}: schema violation in field `{field}`: {message}")]
    Schema {
        file: PathBuf,
        line: usize,
        field: String,
        message: String,
    },

    #[error("duplicate entity id `{0}`")]
    DuplicateEntity(String),

    #[error("invalid temporal value: {0}")]
    InvalidTime(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("generation error: {0}")]
    Generation(String),

    #[error("implicit constraint could not be resolved: {0}")]
    Resolution(String),

    #[error("recursion depth exceeded: intermediate question `{0}` was classified implicit")]
    RecursionDepth(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("endpoint error: {0}")]
    Endpoint(String),

    #[error("unknown strategy `{name}` for {kind}")]
    UnknownStrategy { kind: &'static str, name: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
