//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by image, noise, filter, metric and benchmark
/// operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Image dimensions are invalid (zero width or height, length
    /// mismatch).
    #[error("invalid dimensions: {0}")]
    Dimension(String),

    /// An operation parameter violates its precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Two images that must share dimensions do not.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Pixel values outside the range an operation requires.
    #[error("value out of range: {0}")]
    Range(String),

    /// Malformed PGM data; `offset` is the byte position of the fault.
    #[error("PGM parse error at byte {offset}: {message}")]
    PgmParse { offset: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn pgm(offset: usize, message: impl Into<String>) -> Self {
        Error::PgmParse {
            offset,
            message: message.into(),
        }
    }
}
