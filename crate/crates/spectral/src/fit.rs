//! Least-squares fit of the two-term Weyl asymptotics to counting samples.

use nalgebra::{DMatrix, DVector};

use crate::counting::CountingSamples;
use crate::error::{Result, SpectralError};
use crate::galerkin::TRUSTED_FRACTION;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitWindow {
    pub lo: f64,
    pub hi: f64,
}

impl FitWindow {
    /// `[lo_frac * K, hi_frac * K]`.
    pub fn fraction(k_max: usize, lo_frac: f64, hi_frac: f64) -> Self {
        FitWindow {
            lo: lo_frac * k_max as f64,
            hi: hi_frac * k_max as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeylFit {
    /// Coefficient of `mu^{n-1}`.
    pub first: f64,
    /// Coefficient of `mu^{n-2}`.
    pub second: f64,
    /// Coefficient of `mu^{n-3}` when the nuisance term is fitted.
    pub nuisance: Option<f64>,
    /// Root mean square of the fit residual.
    pub residual: f64,
    pub samples: usize,
}

/// Fit `c1 mu^{n-1} + c0 mu^{n-2} (+ c_{-1} mu^{n-3})` to the samples inside `window`.
pub fn fit_weyl(samples: &CountingSamples, n: usize, window: FitWindow, nuisance: bool) -> Result<WeylFit> {
    let FitWindow { lo, hi } = window;
    if !(lo > 0.0 && hi > lo) || hi / lo < 2.0 {
        return Err(SpectralError::IllConditionedFit(format!(
            "window [{lo}, {hi}] spans less than a factor 2"
        )));
    }
    let limit = TRUSTED_FRACTION * samples.k_max as f64;
    if hi > limit * (1.0 + 1e-12) {
        return Err(SpectralError::WindowViolation(format!("mu_hi = {hi} above trusted limit {limit}")));
    }
    let smear = 4.0 / samples.t_rho;
    if lo < smear * (1.0 - 1e-12) {
        return Err(SpectralError::WindowViolation(format!(
            "mu_lo = {lo} below mollifier scale {smear}"
        )));
    }
    let pts: Vec<(f64, f64)> = samples
        .mu
        .iter()
        .zip(&samples.values)
        .filter(|(m, _)| **m >= lo && **m <= hi)
        .map(|(m, v)| (*m, *v))
        .collect();
    let cols = if nuisance { 3 } else { 2 };
    if pts.len() < cols + 1 {
        return Err(SpectralError::IllConditionedFit(format!(
            "{} samples in window for {cols} parameters",
            pts.len()
        )));
    }
    let p = n as i32;
    // Columns are scaled by powers of hi so the design matrix is O(1).
    let design = DMatrix::from_fn(pts.len(), cols, |r, c| (pts[r].0 / hi).powi(p - 1 - c as i32));
    let rhs = DVector::from_iterator(pts.len(), pts.iter().map(|q| q.1));
    let svd = design.clone().svd(true, true);
    let sv = &svd.singular_values;
    let cond = sv.max() / sv.min();
    if !cond.is_finite() || cond > 1e12 {
        return Err(SpectralError::IllConditionedFit(format!("condition number {cond:e}")));
    }
    let coef = svd
        .solve(&rhs, 0.0)
        .map_err(|e| SpectralError::IllConditionedFit(e.to_string()))?;
    let resid = &design * &coef - &rhs;
    let residual = (resid.norm_squared() / pts.len() as f64).sqrt();
    let unscale = |c: usize| coef[c] / hi.powi(p - 1 - c as i32);
    Ok(WeylFit {
        first: unscale(0),
        second: unscale(1),
        nuisance: nuisance.then(|| unscale(2)),
        residual,
        samples: pts.len(),
    })
}
