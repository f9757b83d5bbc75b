use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IcaError {
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("too few samples: got {got}, need at least {need}")]
    TooFewSamples { got: usize, need: usize },
    #[error("covariance is rank deficient (eigenvalue ratio {ratio:e}); fewer effective sources than channels")]
    RankDeficient { ratio: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("maxent Jacobian is singular (condition number {condition:e})")]
    SingularJacobian { condition: f64 },
    #[error(
        "Newton iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("demixing matrix is degenerate: {0}")]
    DegenerateDemixing(String),
    #[error("step collapsed to the origin")]
    StepCollapse,
    #[error("density estimation failed: {0}")]
    DensityFailure(String),
    #[error("random mixing stayed ill-conditioned after {attempts} draws")]
    IllConditioned { attempts: usize },
    #[error("gain matrix is degenerate: {0}")]
    DegenerateGain(String),
    #[error("source row {0} has zero variance")]
    DegenerateSource(usize),
}

pub type Result<T, E = IcaError> = std::result::Result<T, E>;
