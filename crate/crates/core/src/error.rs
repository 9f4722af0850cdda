//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Errors raised by region computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A caller-supplied argument violates an operation precondition.
    Argument(String),
    /// A model or configuration fails one of its stated invariants.
    Validation(String),
    /// A computation would exceed a configured size cap.
    Capacity(String),
    /// Codeword generation hit a zero-probability conditioning configuration.
    Generation(String),
    /// An internal consistency assumption failed (e.g. an LP that must be
    /// feasible was not).
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Argument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Validation(msg) => write!(f, "validation failed: {msg}"),
            Error::Capacity(msg) => write!(f, "capacity exceeded: {msg}"),
            Error::Generation(msg) => write!(f, "generation failed: {msg}"),
            Error::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
