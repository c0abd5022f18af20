//! Error type shared across the crate.
//!
//! Errors are surfaced at public API boundaries; internal hot paths use
//! debug assertions for shape bookkeeping instead.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration: bad layer widths, zero sample counts,
    /// impossible splits, out-of-range hyperparameters.
    #[error("configuration error: {0}")]
    Config(String),

    /// Bad input data: unreadable files, unparseable cells, shape or
    /// length mismatches at an API boundary, non-finite features.
    #[error("data error: {0}")]
    Data(String),

    /// Numeric failure during training: non-finite loss or gradients.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Invariant violation that indicates a bug rather than bad input.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
