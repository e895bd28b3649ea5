use thiserror::Error;

/// Errors shared across the state, protocol, attack and game layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("register label collision: {0}")]
    LabelCollision(String),

    #[error("unknown register label: {0}")]
    UnknownRegister(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("channel is not an isometry: {0}")]
    NotIsometry(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid protocol: {0}")]
    Protocol(String),

    #[error("missing conditional row for {0}")]
    MissingRow(String),

    #[error("simplex net size {size} exceeds cap {cap}")]
    NetTooLarge { size: u128, cap: u128 },

    #[error("linear program failed: {0}")]
    LpFailure(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("numerics fault: {0}")]
    Numerics(String),

    #[error("fixture cap exceeded: {0}")]
    CapExceeded(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
