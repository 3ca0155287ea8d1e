//! Error type of the simulation and tooling layer.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Core(#[from] eedesign_core::Error),
    #[error("channel matrix is rank deficient")]
    RankDeficient,
    #[error("{0}")]
    Invalid(String),
    #[error("{file}:{line}: {message}")]
    Parse { file: String, line: usize, message: String },
    #[error("[{section}] {message}")]
    Validation { section: String, message: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl SimError {
    /// Process exit status: 2 for bad input, 3 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            SimError::Parse { .. } | SimError::Validation { .. } | SimError::Io { .. } | SimError::Csv(_) => 2,
            SimError::Core(_) | SimError::RankDeficient | SimError::Invalid(_) => 3,
        }
    }

    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            SimError::Core(_) => "numerical",
            SimError::RankDeficient => "rank-deficient",
            SimError::Invalid(_) => "invalid-argument",
            SimError::Parse { .. } => "config-parse",
            SimError::Validation { .. } => "config-validation",
            SimError::Io { .. } => "io",
            SimError::Csv(_) => "csv",
        }
    }
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> SimError {
    SimError::Invalid(msg.into())
}
