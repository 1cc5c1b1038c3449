use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("order violated: {0}")]
    Order(String),

    #[error("budget exceeded after {nodes} nodes: {message}")]
    Budget { nodes: u64, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid scenario: {0}")]
    Spec(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
