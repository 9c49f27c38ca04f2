use thiserror::Error;

/// Errors raised by the geometry, kernel, measure and solver layers.
#[derive(Debug, Error)]
pub enum RieszError {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// A kernel or inversion was evaluated at a coincident pair of points.
    #[error("singularity at index {index}: {detail}")]
    Singularity { index: usize, detail: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, RieszError>;

pub(crate) fn argument<T>(msg: impl Into<String>) -> Result<T> {
    Err(RieszError::Argument(msg.into()))
}
