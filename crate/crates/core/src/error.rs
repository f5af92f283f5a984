use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("empty set: {0}")]
    EmptySet(&'static str),

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("incompatible sets: {0}")]
    Incompatible(String),

    #[error("coordinate {coordinate} out of [0,1]: {value}")]
    OutOfRange { coordinate: usize, value: String },

    #[error("domain violation: {0} is not in [0,1]")]
    Domain(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("interpolant segment {segment} rejected: {reason}")]
    Interpolant { segment: usize, reason: String },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
