use std::path::PathBuf;

use qcorr::QcorrError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] QcorrError),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    ChecksFailed(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 2: input or argument could not be parsed; 3: input parsed but is not a
    /// valid state or parameter set; 4: too many subsystems to enumerate
    /// orderings; 1: anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                QcorrError::Parse(_)
                | QcorrError::InvalidGrid(_)
                | QcorrError::GridTooCoarse { .. }
                | QcorrError::InvalidPermutation(_)
                | QcorrError::InvalidSubsystem { .. } => 2,
                QcorrError::InvalidDimension(_)
                | QcorrError::Shape(_)
                | QcorrError::NotHermitian { .. }
                | QcorrError::TraceViolation { .. }
                | QcorrError::NotPositive { .. }
                | QcorrError::InvalidCut { .. }
                | QcorrError::InvalidSelection(_)
                | QcorrError::ParameterDomain(_)
                | QcorrError::RankOutOfRange { .. }
                | QcorrError::InvalidChain(_) => 3,
                QcorrError::PermutationLimit { .. } => 4,
                QcorrError::CorollaryViolated { .. } | QcorrError::NoPeak => 1,
            },
            CliError::Io { .. } | CliError::ChecksFailed(_) => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
