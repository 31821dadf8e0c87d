use thiserror::Error;

/// Failures raised by the kernel operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RieszError {
    /// Two operands were built over different sample spaces.
    #[error("operands live on different sample spaces")]
    SpaceMismatch,
    /// An argument is outside the operation's domain.
    #[error("{0}")]
    Domain(String),
    /// An exhaustive enumeration would exceed a configured cap.
    #[error("{what}: {actual} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        cap: usize,
        actual: usize,
    },
    /// A sample space failed validation.
    #[error("invalid sample space: {0}")]
    InvalidSpace(String),
}

impl RieszError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        RieszError::Domain(msg.into())
    }

    pub fn is_resource(&self) -> bool {
        matches!(self, RieszError::CapExceeded { .. })
    }
}

pub type Result<T, E = RieszError> = std::result::Result<T, E>;
