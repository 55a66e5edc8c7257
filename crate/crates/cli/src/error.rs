//! CLI failure classes and their exit codes.

use dirac_decay::DecayError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Decay(#[from] DecayError),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("need at least 2 applicable methods, got {0}")]
    MethodCount(usize),
    #[error("unknown scenario '{0}' (known: {known})", known = crate::scenarios::SCENARIOS.join(", "))]
    UnknownScenario(String),
    #[error("tolerance breach: {0}")]
    Tolerance(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv failure: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Decay(e) => e.exit_code(),
            CliError::Tolerance(_) => 2,
            CliError::Config(_) | CliError::MethodCount(_) | CliError::UnknownScenario(_) => 3,
            CliError::Io(_) | CliError::Csv(_) => 4,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            CliError::Decay(e) => e.code(),
            CliError::Config(_) => "CONFIG",
            CliError::MethodCount(_) => "METHOD_COUNT",
            CliError::UnknownScenario(_) => "UNKNOWN_SCENARIO",
            CliError::Tolerance(_) => "TOLERANCE",
            CliError::Io(_) => "IO",
            CliError::Csv(_) => "CSV",
        }
    }
}
