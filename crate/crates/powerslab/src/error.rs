//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide error type.
///
/// `InvalidArgument` marks caller mistakes (bad ranges, parity, domain
/// violations); `Config` marks incomplete or inconsistent configuration
/// (e.g. a custom modulus without its required constant table);
/// `Unsupported` marks requests outside the implemented data range.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialize(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
}
