use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("unknown model '{0}'")]
    UnknownModel(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("ellipticity violated: {0}")]
    EllipticityViolation(String),
    #[error("Galerkin dimension {dim} exceeds budget {budget}")]
    BudgetExceeded { dim: usize, budget: usize },
    #[error("eigensolver failed: {0}")]
    SolveFailure(String),
    #[error("mollifier support {0} is not below 2 pi")]
    SupportTooLarge(f64),
    #[error("fit window outside the trusted spectral window: {0}")]
    WindowViolation(String),
    #[error("ill-conditioned fit: {0}")]
    IllConditionedFit(String),
    #[error(transparent)]
    Core(#[from] weylsys_core::Error),
}

pub type Result<T> = std::result::Result<T, SpectralError>;
