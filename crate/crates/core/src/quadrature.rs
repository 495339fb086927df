//! Quadrature rules: cosphere rules, Gauss-Legendre nodes, adaptive
//! Gauss-Kronrod for complex integrands, and deterministic pairwise sums.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Pairwise summation in a fixed order, so results do not depend on threading.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

pub fn pairwise_sum_c(v: &[Complex64]) -> Complex64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum_c(a) + pairwise_sum_c(b)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Quadrature on the unit sphere `S^{n-1}` of `R^n`.
///
/// For `n = 2` the rule is the periodic trapezoid rule in the angle; for
/// `n = 3` it is Gauss-Legendre in the polar cosine times a trapezoid rule in
/// the azimuth. Weights sum to the sphere area.
#[derive(Clone, Debug)]
pub struct CosphereQuadrature {
    pub n: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl CosphereQuadrature {
    pub fn new(n: usize, resolution: usize) -> Result<Self> {
        if resolution < 4 {
            return Err(Error::InvalidArgument(format!("resolution {resolution}")));
        }
        match n {
            2 => {
                let w = 2.0 * PI / resolution as f64;
                let nodes = (0..resolution)
                    .map(|k| {
                        let t = w * k as f64;
                        vec![t.cos(), t.sin()]
                    })
                    .collect();
                Ok(CosphereQuadrature {
                    n,
                    nodes,
                    weights: vec![w; resolution],
                })
            }
            3 => {
                let (z, wz) = gauss_legendre(resolution / 2);
                let dphi = 2.0 * PI / resolution as f64;
                let mut nodes = Vec::new();
                let mut weights = Vec::new();
                for (zi, wi) in z.iter().zip(&wz) {
                    let r = (1.0 - zi * zi).sqrt();
                    for k in 0..resolution {
                        let t = dphi * k as f64;
                        nodes.push(vec![r * t.cos(), r * t.sin(), *zi]);
                        weights.push(wi * dphi);
                    }
                }
                Ok(CosphereQuadrature { n, nodes, weights })
            }
            _ => Err(Error::Unsupported(format!("cosphere quadrature in dimension {n}"))),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integral of `f` over the sphere, summed pairwise.
    pub fn integrate<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&[f64]) -> Result<f64>,
    {
        let terms = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| f(x).map(|v| v * w))
            .collect::<Result<Vec<_>>>()?;
        Ok(pairwise_sum(&terms))
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let s = f(c - h * XGK[i]) + f(c + h * XGK[i]);
        k += s * WGK[i];
        if i % 2 == 1 {
            g += s * WG[i / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// Outcome of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct Integral {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

/// Globally adaptive 7/15-point Gauss-Kronrod integration on `[a, b]`.
///
/// Converges when the summed error estimate is below `max(abs_tol, rel_tol * |I|)`.
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64, max_intervals: usize) -> Result<Integral>
where
    F: Fn(f64) -> Complex64,
{
    if !(a.is_finite() && b.is_finite()) || b <= a {
        return Err(Error::InvalidArgument(format!("interval [{a}, {b}]")));
    }
    let mut parts = vec![{
        let (v, e) = gk15(&f, a, b);
        (a, b, v, e)
    }];
    let mut evaluations = 15;
    loop {
        let value: Complex64 = parts.iter().map(|p| p.2).sum();
        let error: f64 = parts.iter().map(|p| p.3).sum();
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::QuadratureFailure("non-finite integrand".into()));
        }
        if error <= abs_tol.max(rel_tol * value.norm()) {
            return Ok(Integral { value, error, evaluations });
        }
        if parts.len() >= max_intervals {
            return Err(Error::QuadratureFailure(format!(
                "error {error:.3e} after {} subintervals",
                parts.len()
            )));
        }
        let worst = (0..parts.len())
            .max_by(|&i, &j| parts[i].3.total_cmp(&parts[j].3))
            .unwrap_or(0);
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        for (l, r) in [(lo, mid), (mid, hi)] {
            let (v, e) = gk15(&f, l, r);
            parts.push((l, r, v, e));
        }
        evaluations += 30;
    }
}
