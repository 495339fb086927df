//! End-to-end spectral fit: counting samples at several points and a Weyl fit for each.

use rayon::prelude::*;

use crate::counting::{local_counting_mollified, uniform_grid, Branch};
use crate::error::Result;
use crate::fit::{fit_weyl, FitWindow, WeylFit};
use crate::galerkin::SpectrumResult;
use crate::mollifier::{Mollifier, DEFAULT_T_RHO};

#[derive(Clone, Copy, Debug)]
pub struct SpectralFitOptions {
    pub t_rho: f64,
    /// Window `[lo * K, hi * K]`.
    pub window: (f64, f64),
    pub samples: usize,
    pub nuisance: bool,
    pub branch: Branch,
}

impl Default for SpectralFitOptions {
    fn default() -> Self {
        SpectralFitOptions {
            t_rho: DEFAULT_T_RHO,
            window: (0.2, 0.6),
            samples: 81,
            nuisance: false,
            branch: Branch::Positive,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SpectralFitRow {
    pub x: Vec<f64>,
    pub k_max: usize,
    pub fit: WeylFit,
}

pub fn spectral_fit(spectrum: &SpectrumResult, xs: &[Vec<f64>], opts: &SpectralFitOptions) -> Result<Vec<SpectralFitRow>> {
    let moll = Mollifier::new(opts.t_rho)?;
    let window = FitWindow::fraction(spectrum.k_max, opts.window.0, opts.window.1);
    let mu = uniform_grid(window.lo, window.hi, opts.samples);
    xs.par_iter()
        .map(|x| {
            let s = local_counting_mollified(spectrum, &moll, x, &mu, opts.branch)?;
            Ok(SpectralFitRow {
                x: x.clone(),
                k_max: spectrum.k_max,
                fit: fit_weyl(&s, spectrum.n, window, opts.nuisance)?,
            })
        })
        .collect()
}
