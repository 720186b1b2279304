use thiserror::Error;

/// Errors produced by the estimators, oracles and the experiment harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient sample: {0}")]
    InsufficientSample(String),

    #[error("invalid order: {0}")]
    InvalidOrder(String),

    #[error("confidence interval undefined: {0}")]
    UndefinedInterval(String),

    #[error("unsupported distribution pair: {0}")]
    Unsupported(String),

    #[error("subset enumeration would visit {0} subset pairs (limit {1})")]
    CombinatorialExplosion(u128, u128),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("invalid config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
