use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-range input.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Input violates a documented precondition (unnormalized state, non-unitary gate, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Request exceeds a size cap of the exact code paths.
    #[error("capability exceeded: {0}")]
    Capability(String),

    /// Value outside the domain on which a density is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("sampler initialization failed: {0}")]
    Initialization(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("degenerate spectrum: {0}")]
    Degenerate(String),

    #[error("LAPACK routine {routine} failed with info = {info}")]
    Lapack { routine: &'static str, info: i32 },

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Self::InvalidArgument(msg.into())
    }

    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Self::Precondition(msg.into())
    }
}
