//! Error type shared by all core operations.

use alloc::string::String;
use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A caller-supplied argument violates an operation precondition.
    Argument(String),
    /// Input text could not be parsed; `line` is 1-based.
    Parse { line: usize, message: String },
    /// Data is structurally valid but violates a domain invariant.
    Validation(String),
    /// A numeric computation produced a non-finite or otherwise unusable value.
    Numeric(String),
    /// An iterative solver hit its iteration cap before reaching tolerance.
    Convergence { message: String, violation: f64 },
    /// A metric is undefined for the given inputs (e.g. single-class truth).
    UndefinedMetric(String),
    /// Two objects that must agree in shape do not.
    Dimension {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Argument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Parse { line, message } => write!(f, "parse error at line {line}: {message}"),
            Error::Validation(msg) => write!(f, "validation error: {msg}"),
            Error::Numeric(msg) => write!(f, "numeric error: {msg}"),
            Error::Convergence { message, violation } => {
                write!(f, "failed to converge: {message} (final violation {violation:e})")
            }
            Error::UndefinedMetric(msg) => write!(f, "metric undefined: {msg}"),
            Error::Dimension {
                what,
                expected,
                actual,
            } => write!(f, "dimension mismatch for {what}: expected {expected}, got {actual}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
