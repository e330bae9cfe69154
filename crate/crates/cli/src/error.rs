use planar_qec::layout::LayoutError;
use planar_qec::{McError, NoiseError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid flags or configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// Unreadable or invalid calibration data.
    #[error("data error: {0}")]
    Data(String),
    /// Simulation or output failure.
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Data(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl From<McError> for CliError {
    fn from(e: McError) -> Self {
        match e {
            McError::InvalidGrid(_)
            | McError::NoTrials
            | McError::TooFewArrangements(_)
            | McError::Lattice(_)
            | McError::Noise(NoiseError::Unachievable { .. }) => CliError::Config(e.to_string()),
            McError::Layout(_) | McError::ArrangementSize { .. } | McError::Noise(_) => CliError::Data(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<LayoutError> for CliError {
    fn from(e: LayoutError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}
