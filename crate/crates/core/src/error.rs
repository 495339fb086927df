use thiserror::Error;

/// Failures raised by the symbol calculus and the coefficient pipelines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid phase-space point: {0}")]
    InvalidPoint(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("symbol is not elliptic: {0}")]
    NotElliptic(String),
    #[error("eigenvalues {0:.6e} and {1:.6e} are not separated")]
    DegenerateSpectrum(f64, f64),
    #[error("eigenvector phase alignment failed (overlap {0:.3e})")]
    GaugeAlignmentFailure(f64),
    #[error("resolvent is singular: distance {0:.3e} to the spectrum")]
    SingularResolvent(f64),
    #[error("spectral parameter must have nonzero imaginary part")]
    RealSpectralParameter,
    #[error("angle {0} outside (0, pi)")]
    AngleOutOfRange(f64),
    #[error("recovery angles coincide")]
    DegenerateAngles,
    #[error("coefficient has imaginary residue {0:.3e}")]
    ComplexResidue(f64),
    #[error("quadrature did not converge: {0}")]
    QuadratureFailure(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
