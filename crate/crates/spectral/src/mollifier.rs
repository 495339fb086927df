//! Even mollifier `rho` with compactly supported Fourier transform.
//!
//! `rho_hat(t) = 1` for `|t| <= T/2`, `0` for `|t| >= T`, with a
//! `C^infinity` step in between built from `exp(-1/u)`. Then
//! `rho(nu) = (1/pi) int_0^T rho_hat(t) cos(nu t) dt`, so `int rho = 1` and all
//! moments of `rho` vanish. Values are tabulated once for `T = 1` and rescaled
//! via `rho_T(nu) = T rho_1(T nu)`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Result, SpectralError};

/// Default width of the Fourier support.
pub const DEFAULT_T_RHO: f64 = 4.0;

const TABLE_STEP: f64 = 0.01;
const TABLE_RANGE: f64 = 800.0;
const QUAD_NODES: usize = 1024;

/// `rho_hat` for `T = 1`.
pub fn rho_hat_unit(t: f64) -> f64 {
    let a = t.abs();
    if a <= 0.5 {
        return 1.0;
    }
    if a >= 1.0 {
        return 0.0;
    }
    let u = 2.0 * a - 1.0;
    let f = |s: f64| if s <= 0.0 { 0.0 } else { (-1.0 / s).exp() };
    let (p, q) = (f(1.0 - u), f(u));
    p / (p + q)
}

struct Table {
    values: Vec<f64>,
    derivs: Vec<f64>,
}

fn unit_table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        let h = 1.0 / QUAD_NODES as f64;
        let weights: Vec<f64> = (0..=QUAD_NODES)
            .map(|l| {
                let w = if l == 0 || l == QUAD_NODES { 0.5 * h } else { h };
                w * rho_hat_unit(l as f64 * h) / PI
            })
            .collect();
        let count = (TABLE_RANGE / TABLE_STEP) as usize + 1;
        let mut values = Vec::with_capacity(count);
        let mut derivs = Vec::with_capacity(count);
        for j in 0..count {
            let nu = j as f64 * TABLE_STEP;
            let (v, d) = unit_rho_direct(nu, &weights, h);
            values.push(v);
            derivs.push(d);
        }
        Table { values, derivs }
    })
}

/// Trapezoid evaluation of `rho_1(nu)` and `rho_1'(nu)`; the rotation
/// `exp(i nu t_l)` is advanced by complex multiplication.
fn unit_rho_direct(nu: f64, weights: &[f64], h: f64) -> (f64, f64) {
    let (s, c) = (nu * h).sin_cos();
    let (mut re, mut im) = (1.0, 0.0);
    let (mut v, mut d) = (0.0, 0.0);
    for (l, w) in weights.iter().enumerate() {
        if *w != 0.0 {
            v += w * re;
            d -= w * (l as f64 * h) * im;
        }
        let nre = re * c - im * s;
        im = re * s + im * c;
        re = nre;
    }
    (v, d)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mollifier {
    t_rho: f64,
}

/// Uniform grid `start + k * step`, `k = 0..count`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RhoGrid {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl Mollifier {
    pub fn new(t_rho: f64) -> Result<Self> {
        if !(t_rho > 0.0 && t_rho.is_finite()) {
            return Err(SpectralError::InvalidParameter(format!("T_rho = {t_rho}")));
        }
        if t_rho >= 2.0 * PI {
            return Err(SpectralError::SupportTooLarge(t_rho));
        }
        Ok(Mollifier { t_rho })
    }

    pub fn t_rho(&self) -> f64 {
        self.t_rho
    }

    pub fn rho_hat(&self, t: f64) -> f64 {
        rho_hat_unit(t / self.t_rho)
    }

    /// Beyond this distance `rho` is treated as zero.
    pub fn cutoff(&self) -> f64 {
        TABLE_RANGE / self.t_rho
    }

    /// `rho(nu)` by cubic Hermite interpolation of the tabulated values.
    pub fn rho(&self, nu: f64) -> f64 {
        let s = (nu * self.t_rho).abs() / TABLE_STEP;
        let j = s.floor() as usize;
        let tab = unit_table();
        if j + 1 >= tab.values.len() {
            return 0.0;
        }
        let u = s - j as f64;
        let (u2, u3) = (u * u, u * u * u);
        let v = (2.0 * u3 - 3.0 * u2 + 1.0) * tab.values[j]
            + (u3 - 2.0 * u2 + u) * TABLE_STEP * tab.derivs[j]
            + (-2.0 * u3 + 3.0 * u2) * tab.values[j + 1]
            + (u3 - u2) * TABLE_STEP * tab.derivs[j + 1];
        self.t_rho * v
    }

    /// `rho(nu)` by direct trapezoid quadrature of the inverse transform.
    pub fn rho_direct(&self, nu: f64) -> f64 {
        let h = 1.0 / QUAD_NODES as f64;
        let weights: Vec<f64> = (0..=QUAD_NODES)
            .map(|l| {
                let w = if l == 0 || l == QUAD_NODES { 0.5 * h } else { h };
                w * rho_hat_unit(l as f64 * h) / PI
            })
            .collect();
        self.t_rho * unit_rho_direct(nu * self.t_rho, &weights, h).0
    }

    /// Samples of `rho` on a uniform grid, by discrete Fourier inversion.
    pub fn samples(&self, grid: &RhoGrid) -> Vec<f64> {
        (0..grid.count)
            .map(|k| self.rho_direct(grid.start + k as f64 * grid.step))
            .collect()
    }

    /// `int rho` from samples on a symmetric grid spanning the cutoff.
    pub fn mass_from_samples(&self, step: f64) -> f64 {
        let k = (self.cutoff() / step).ceil() as usize;
        let grid = RhoGrid {
            start: -(k as f64) * step,
            step,
            count: 2 * k + 1,
        };
        step * self.samples(&grid).iter().sum::<f64>()
    }
}
