//! Local Weyl coefficients of first-order elliptic matrix systems.
//!
//! The crate computes the first two local Weyl coefficients of a first-order
//! Hermitian system from its principal and subprincipal symbols, either
//! directly or by recovering them from the symbol of a resolvent-type
//! operator combination.

pub mod bracket;
pub mod eigen;
pub mod error;
pub mod gn;
pub mod quadrature;
pub mod resolvent;
pub mod symbol;
pub mod weyl;

pub use bracket::{generalized_bracket, poisson_bracket};
pub use eigen::{eigen_decompose, eigen_jet, eigen_jet_with, EigenJet, Gauge, JetMethod, JetOptions, SheetJet};
pub use error::{Error, Result};
pub use quadrature::CosphereQuadrature;
pub use symbol::{symbol_jet, CMat, MatrixJet, PhasePoint, SymbolField, SymbolPair};
pub use weyl::{first_weyl, second_weyl, WeylCoefficients, WeylOptions};
