//! Crate-wide error type.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug)]
pub enum Error {
    /// Shape or size constraint violated (mismatched dims, non-divisible
    /// pooling factor, zero-sized target, ...).
    Dimension(String),
    /// Scalar parameter outside its admissible range.
    Parameter { name: &'static str, message: String },
    /// Malformed file contents; `offset` is the byte at which decoding failed.
    Decode { offset: usize, message: String },
    /// A point or window falls outside the grid it indexes into.
    Coordinate(String),
    /// Non-finite value where a finite one is required.
    Numeric(String),
    /// Stale or mismatched cached state (e.g. a backward tape that does not
    /// belong to the supplied gradients).
    State(String),
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Dimension(msg) => write!(f, "dimension error: {msg}"),
            Self::Parameter { name, message } => {
                write!(f, "parameter error: {name}: {message}")
            }
            Self::Decode { offset, message } => {
                write!(f, "decode error at byte {offset}: {message}")
            }
            Self::Coordinate(msg) => write!(f, "coordinate error: {msg}"),
            Self::Numeric(msg) => write!(f, "numeric error: {msg}"),
            Self::State(msg) => write!(f, "state error: {msg}"),
            Self::Io(err) => write!(f, "io error: {err}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Self::Io(err) => Some(err),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Self::Io(err)
    }
}

impl Error {
    pub fn dimension(msg: impl Into<String>) -> Self {
        Self::Dimension(msg.into())
    }

    pub fn parameter(name: &'static str, message: impl Into<String>) -> Self {
        Self::Parameter {
            name,
            message: message.into(),
        }
    }

    pub fn decode(offset: usize, message: impl Into<String>) -> Self {
        Self::Decode {
            offset,
            message: message.into(),
        }
    }

    pub fn coordinate(msg: impl Into<String>) -> Self {
        Self::Coordinate(msg.into())
    }
}
