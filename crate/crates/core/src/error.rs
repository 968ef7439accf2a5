use std::fmt;

use crate::field::FieldSpec;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure classes; the CLI maps these onto exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input: malformed field, mismatched operands, out-of-range values.
    Usage,
    /// Mathematically undefined request (singular matrix, inverse of zero, 0^0).
    Domain,
    /// Work or memory budget exceeded.
    Budget,
    /// An internal invariant failed to hold.
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(FieldSpec, FieldSpec),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{0}")]
    Domain(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("inconsistent result: {0}")]
    Inconsistent(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidField(_)
            | Error::FieldMismatch(..)
            | Error::Dimension(_)
            | Error::InvalidArgument(_) => ErrorKind::Usage,
            Error::Domain(_) => ErrorKind::Domain,
            Error::Budget(_) => ErrorKind::Budget,
            Error::Inconsistent(_) => ErrorKind::Inconsistent,
        }
    }

    pub(crate) fn domain(msg: impl fmt::Display) -> Self {
        Error::Domain(msg.to_string())
    }

    pub(crate) fn invalid(msg: impl fmt::Display) -> Self {
        Error::InvalidArgument(msg.to_string())
    }
}
