use thiserror::Error;

/// Errors raised by space construction, estimation and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid space at `{field}`: {reason}")]
    InvalidSpace { field: String, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The norm is not differentiable at the given point; callers perturb and retry.
    #[error("non-smooth point: {0}")]
    NonSmooth(String),

    /// A numerical procedure could not produce a trustworthy answer.
    #[error("numerical diagnostic: {0}")]
    Numerical(String),

    #[error("unknown claim id `{0}`")]
    UnknownClaim(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn space(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidSpace {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for input-validation failures (as opposed to numerical diagnostics).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::InvalidSpace { .. }
                | Error::InvalidArgument(_)
                | Error::UnknownClaim(_)
                | Error::Json(_)
                | Error::Csv(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
