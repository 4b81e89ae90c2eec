use alloc::string::String;
use core::fmt;

/// Error type shared by every operation in the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum RsccError {
    /// An argument is malformed or violates a documented precondition.
    InvalidArgument(String),
    /// A state or phase-space point lies outside its declared space.
    Domain(String),
    /// An enumeration or recursion would exceed its configured cap.
    ResourceCap { what: &'static str, limit: u64 },
    /// The operation is not defined for this kind of map or scenario.
    Unsupported(String),
    /// The scenario declaration is missing data or is inconsistent.
    Configuration(String),
}

impl fmt::Display for RsccError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RsccError::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            RsccError::Domain(msg) => write!(f, "domain error: {msg}"),
            RsccError::ResourceCap { what, limit } => {
                write!(f, "resource cap exceeded: {what} (limit {limit})")
            }
            RsccError::Unsupported(msg) => write!(f, "unsupported: {msg}"),
            RsccError::Configuration(msg) => write!(f, "configuration error: {msg}"),
        }
    }
}

impl core::error::Error for RsccError {}

pub type Result<T> = core::result::Result<T, RsccError>;

pub(crate) fn invalid(msg: impl Into<String>) -> RsccError {
    RsccError::InvalidArgument(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> RsccError {
    RsccError::Domain(msg.into())
}

pub(crate) fn unsupported(msg: impl Into<String>) -> RsccError {
    RsccError::Unsupported(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> RsccError {
    RsccError::Configuration(msg.into())
}
