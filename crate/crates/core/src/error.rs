use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Adaptive quadrature ran out of its evaluation budget.
    #[error("numeric failure: {message} (achieved error estimate {achieved_error:e})")]
    NumericFailure { message: String, achieved_error: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Closed-form value and numeric oracle disagree beyond the allowed margin.
    #[error("model mismatch: formula {formula} vs oracle {oracle}")]
    ModelMismatch { formula: f64, oracle: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
