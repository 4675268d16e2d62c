use hinev_core::autoencoder::TrainError;
use hinev_core::events::EventError;
use hinev_core::EvalError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Rule(String),
    #[error("{0}")]
    Divergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Rule(_) => 2,
            CliError::Divergence(_) => 3,
        }
    }
}

impl From<EventError> for CliError {
    fn from(e: EventError) -> Self {
        CliError::Rule(e.to_string())
    }
}

impl From<TrainError> for CliError {
    fn from(e: TrainError) -> Self {
        match e {
            TrainError::Divergence { .. } => CliError::Divergence(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Events(e) => e.into(),
            EvalError::Train(e) => e.into(),
            EvalError::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<hinev_core::hin::HinError> for CliError {
    fn from(e: hinev_core::hin::HinError) -> Self {
        match e {
            hinev_core::hin::HinError::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<hinev_core::embedding::EmbeddingError> for CliError {
    fn from(e: hinev_core::embedding::EmbeddingError) -> Self {
        CliError::Usage(e.to_string())
    }
}
