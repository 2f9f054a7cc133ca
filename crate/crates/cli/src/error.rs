use decoherence::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("model mismatch: calibrated formula gives {formula}, numeric oracle gives {oracle}")]
    Mismatch { formula: f64, oracle: f64 },
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Mismatch { .. } => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(m) | Error::DegenerateInput(m) => CliError::Invalid(m),
            Error::ModelMismatch { formula, oracle } => CliError::Mismatch { formula, oracle },
            e @ Error::NumericFailure { .. } => CliError::Failure(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(format!("i/o error: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}
