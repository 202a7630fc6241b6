use std::io;

use thiserror::Error;

/// Errors produced by the estimation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument or input violated a documented precondition.
    #[error("validation error: {0}")]
    Validation(String),

    /// The generative model is not realizable (e.g. a non-causal AR base).
    #[error("model error: {0}")]
    Model(String),

    /// A numerical routine failed to converge or produced non-finite values.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A dual-frequency grid would exceed the configured matrix size limit.
    #[error(
        "grid of {requested} frequencies exceeds the limit of {limit}; \
         restrict the analysis band or decimate the grid"
    )]
    MemoryGuard { requested: usize, limit: usize },

    /// A structured text or binary input could not be decoded.
    #[error("parse error in {source_name}: {message}")]
    Parse { source_name: String, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn parse(source_name: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
