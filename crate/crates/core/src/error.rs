use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates an operation's documented precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An experiment recipe cannot be satisfied (missing classes, too few
    /// samples, inconsistent strategy).
    #[error("configuration error: {0}")]
    Configuration(String),

    /// Malformed input file. `field` names the offending header field or line.
    #[error("format error in {field}: {message}")]
    Format { field: String, message: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("protocol error: {0}")]
    Protocol(String),

    /// A non-finite value appeared in model parameters or outputs.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn format(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
