use thiserror::Error;

/// Errors produced by the tree, path and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A coding path could not be decoded; `index` is the first offending position.
    #[error("malformed path at index {index}: {reason}")]
    Decode { index: usize, reason: String },

    #[error("requested height {requested} exceeds materialized height {available}")]
    InsufficientMaterialization { requested: usize, available: usize },

    #[error("envelope queried at t = {t}, below its materialized start t_min = {t_min}")]
    Unmaterialized { t: f64, t_min: f64 },

    #[error("envelope exhausted: needed t = {needed}, materialized up to {t_max}")]
    EnvelopeExhausted { needed: f64, t_max: f64 },

    #[error("Galton-Watson tree exceeded the cap of {cap} vertices")]
    Overflow { cap: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn decode(index: usize, reason: impl Into<String>) -> Self {
        Error::Decode {
            index,
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
