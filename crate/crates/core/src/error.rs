use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown space `{0}`")]
    UnknownSpace(String),
    #[error("unsupported combination: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("numerical check failed: {0}")]
    Numerical(String),
    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
