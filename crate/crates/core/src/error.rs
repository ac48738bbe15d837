use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("n = {n} exceeds the supported limit of {limit} for {what}")]
    Capacity { what: &'static str, n: usize, limit: usize },

    #[error("dspec syntax error at position {pos}: {msg}")]
    DSpecSyntax { pos: usize, msg: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("index {index} out of range for {len} vertices")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("verification failed for pair ({i}, {j}): {reason}")]
    Verification { i: usize, j: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
