use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("group mismatch: {0}")]
    GroupMismatch(String),

    #[error("element budget of {limit} exceeded after {layers} complete layers")]
    Budget { limit: usize, layers: u64 },

    #[error("search budget exhausted after {nodes} nodes")]
    Exhausted { nodes: u64 },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
