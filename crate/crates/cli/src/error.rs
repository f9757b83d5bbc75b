use ica_emk::IcaError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Rank(String),
    #[error("{0}")]
    Density(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Rank(_) => 3,
            CliError::Density(_) => 4,
        }
    }

    pub fn io(context: impl std::fmt::Display, err: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{context}: {err}"))
    }
}

impl From<IcaError> for CliError {
    fn from(e: IcaError) -> Self {
        let msg = e.to_string();
        match e {
            IcaError::InvalidParameter(_) => CliError::Usage(msg),
            IcaError::InvalidData(_)
            | IcaError::TooFewSamples { .. }
            | IcaError::Shape(_)
            | IcaError::DegenerateSource(_)
            | IcaError::DegenerateGain(_)
            | IcaError::IllConditioned { .. } => CliError::Io(msg),
            IcaError::RankDeficient { .. } => CliError::Rank(msg),
            IcaError::SingularJacobian { .. }
            | IcaError::NoConvergence { .. }
            | IcaError::DensityFailure(_)
            | IcaError::DegenerateDemixing(_)
            | IcaError::StepCollapse => CliError::Density(msg),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
