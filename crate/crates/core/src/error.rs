use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("non-finite coordinate in point")]
    NonFinite,

    #[error("grid too fine: {count} points exceeds cap {cap}")]
    GridTooFine { count: usize, cap: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("sampler exhausted after {attempts} attempts ({context})")]
    SamplerExhausted { attempts: usize, context: String },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
