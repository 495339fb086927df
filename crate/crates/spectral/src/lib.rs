//! Spectral validation on the flat torus: Fourier-Galerkin eigenpairs,
//! mollified local counting functions and least-squares Weyl fits.

pub mod counting;
pub mod error;
pub mod fit;
pub mod galerkin;
pub mod model;
pub mod moments;
pub mod mollifier;
pub mod trigpoly;
pub mod verify;

pub use error::{Result, SpectralError};
pub use galerkin::{assemble_and_solve, GalerkinOptions, SpectrumResult};
pub use model::{build_model, TorusModel, CATALOG};
pub use mollifier::{Mollifier, RhoGrid, DEFAULT_T_RHO};
pub use moments::{mollifier_moments, MomentReport};
pub use counting::{local_counting_mollified, uniform_grid, Branch, CountingSamples};
pub use fit::{fit_weyl, FitWindow, WeylFit};
pub use verify::{spectral_fit, SpectralFitOptions, SpectralFitRow};
