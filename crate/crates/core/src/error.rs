use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("numeric tolerance not reached: {message} (achieved relative error {achieved:e})")]
    Numeric { message: String, achieved: f64 },

    #[error("entry size {bits} bits exceeds the budget of {budget} bits")]
    Resource { bits: u64, budget: u64 },

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn parse(position: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            position,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
