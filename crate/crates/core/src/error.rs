//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration or precondition violation.
    #[error("configuration error: {0}")]
    Config(String),

    /// Non-finite data where finite values are required.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A time integration produced a non-finite value.
    #[error("numeric blow-up at t = {t}: {message}")]
    BlowUp { t: f64, message: String },

    /// A measurement (e.g. speed fit) could not be carried out.
    #[error("measurement error: {0}")]
    Measurement(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
