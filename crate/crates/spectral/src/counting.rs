//! Mollified local counting derivative `(N'_± * rho)(x, mu)`.

use crate::error::{Result, SpectralError};
use crate::galerkin::SpectrumResult;
use crate::mollifier::Mollifier;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Branch {
    #[default]
    Positive,
    Negative,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Positive => 1.0,
            Branch::Negative => -1.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CountingSamples {
    pub x: Vec<f64>,
    pub branch: Branch,
    pub k_max: usize,
    pub n: usize,
    pub t_rho: f64,
    pub mu: Vec<f64>,
    pub values: Vec<f64>,
}

/// Uniform grid of `count` points on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// `sum_{±lambda_k > 0} rho(mu ∓ lambda_k) w_k(x)` on the grid `mu`.
pub fn local_counting_mollified(
    spectrum: &SpectrumResult,
    mollifier: &Mollifier,
    x: &[f64],
    mu: &[f64],
    branch: Branch,
) -> Result<CountingSamples> {
    if x.len() != spectrum.n {
        return Err(SpectralError::InvalidParameter(format!(
            "x has {} components, torus dimension is {}",
            x.len(),
            spectrum.n
        )));
    }
    let limit = spectrum.trusted_limit();
    if let Some(bad) = mu.iter().find(|&&m| !(m > 0.0 && m <= limit)) {
        return Err(SpectralError::WindowViolation(format!(
            "mu = {bad} outside trusted window (0, {limit}]"
        )));
    }
    let s = branch.sign();
    let weights = spectrum.weights(x);
    let pairs: Vec<(f64, f64)> = spectrum
        .eigenvalues()
        .into_iter()
        .zip(weights)
        .filter(|(l, _)| s * l > 0.0)
        .map(|(l, w)| (s * l, w))
        .collect();
    let cutoff = mollifier.cutoff();
    let values = mu
        .iter()
        .map(|&m| {
            pairs
                .iter()
                .filter(|(l, _)| (m - l).abs() < cutoff)
                .map(|(l, w)| mollifier.rho(m - l) * w)
                .sum()
        })
        .collect();
    Ok(CountingSamples {
        x: x.to_vec(),
        branch,
        k_max: spectrum.k_max,
        n: spectrum.n,
        t_rho: mollifier.t_rho(),
        mu: mu.to_vec(),
        values,
    })
}

/// Global mollified count `sum_{±lambda_k > 0} rho(mu ∓ lambda_k)`.
pub fn global_counting_mollified(spectrum: &SpectrumResult, mollifier: &Mollifier, mu: f64, branch: Branch) -> f64 {
    let s = branch.sign();
    spectrum
        .eigenvalues()
        .into_iter()
        .filter(|l| s * l > 0.0)
        .map(|l| mollifier.rho(mu - s * l))
        .sum()
}
