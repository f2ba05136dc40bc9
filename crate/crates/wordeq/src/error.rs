use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A configured budget (expansion cap, reachable-set size, subset
    /// construction cap, ...) was exceeded.
    #[error("resource limit exceeded in {stage}: {msg}")]
    Resource { stage: &'static str, msg: String },

    /// A precondition of an operation does not hold.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn resource(stage: &'static str, msg: impl Into<String>) -> Self {
        Error::Resource {
            stage,
            msg: msg.into(),
        }
    }

    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource { .. })
    }
}
