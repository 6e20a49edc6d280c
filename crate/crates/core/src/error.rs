use alloc::string::String;
use core::fmt;

/// Failure modes surfaced by the toolkit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A precondition on the arguments was violated.
    InvalidArgument(String),
    /// A numerical operation could not complete (e.g. a covariance matrix
    /// that is not positive definite).
    NumericFailure(String),
    /// The requested computation exceeds a hard capacity limit. For Fock
    /// truncation failures `required_cutoff` carries the smallest cutoff
    /// that would have satisfied the norm budget, when known.
    CapacityExceeded {
        what: String,
        required_cutoff: Option<usize>,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::NumericFailure(msg) => write!(f, "numeric failure: {msg}"),
            Error::CapacityExceeded {
                what,
                required_cutoff: Some(c),
            } => {
                write!(f, "capacity exceeded: {what} (need cutoff >= {c})")
            }
            Error::CapacityExceeded {
                what,
                required_cutoff: None,
            } => write!(f, "capacity exceeded: {what}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn numeric(msg: impl Into<String>) -> Error {
    Error::NumericFailure(msg.into())
}
