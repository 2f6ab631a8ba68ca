use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A label or set does not belong to the space it is used with.
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed numeric input: shapes, non-finite values, broken invariants.
    #[error("validation error: {0}")]
    Validation(String),
    /// Inconsistent hyperparameters or solver setup.
    #[error("configuration error: {0}")]
    Config(String),
    /// The requested instance is beyond what the exact algorithm supports.
    #[error("capability error: {0}")]
    Capability(String),
    /// An object was used before it was ready (or does not exist).
    #[error("state error: {0}")]
    State(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Short machine-readable name of the variant, used on the wire.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Validation(_) => "validation",
            Error::Config(_) => "config",
            Error::Capability(_) => "capability",
            Error::State(_) => "state",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}
