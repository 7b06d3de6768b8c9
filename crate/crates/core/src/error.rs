use alloc::string::String;

/// Errors produced by the codec, the cipher pipeline and the analysis tools.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not orthogonal (max |T*T^t - I| = {deviation:e})")]
    InvalidTransform { deviation: f64 },

    #[error("malformed JPEG at byte offset {offset}: {reason}")]
    Parse { offset: usize, reason: &'static str },

    #[error("unsupported JPEG feature: {0}")]
    Unsupported(&'static str),

    #[error("cannot encode: {0}")]
    Encode(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn parse(offset: usize, reason: &'static str) -> Self {
        Error::Parse { offset, reason }
    }
}
