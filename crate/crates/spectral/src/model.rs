//! Torus models `L = sum_a (1/2)(A^a(x) D_a + D_a A^a(x)) + B(x)` with
//! `D_a = -i d/dx^a` and trigonometric-polynomial coefficients.
//!
//! The Weyl symbol of `L` is exactly `A^a(x) xi_a + B(x)`, so the principal
//! symbol is `A^a xi_a` and the subprincipal symbol is `B`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use weylsys_core::eigen::eigen_decompose;
use weylsys_core::{CMat, MatrixJet, PhasePoint, SymbolField, SymbolPair};

use crate::error::{Result, SpectralError};
use crate::trigpoly::TrigPolyMatrix;

/// Registration grid: base points times cosphere directions.
pub const REGISTRATION_GRID: (usize, usize) = (64, 256);

#[derive(Clone, Copy, Debug)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    pub description: &'static str,
}

#[derive(Clone, Copy, Debug)]
pub struct ModelInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub params: &'static [ParamSpec],
}

pub const CATALOG: [ModelInfo; 4] = [
    ModelInfo {
        name: "dirac",
        description: "massless Dirac operator sigma_1 D_1 + sigma_2 D_2",
        params: &[],
    },
    ModelInfo {
        name: "shifted-dirac",
        description: "Dirac operator plus beta I",
        params: &[ParamSpec { name: "beta", default: 0.3, description: "scalar shift" }],
    },
    ModelInfo {
        name: "mass-dirac",
        description: "Dirac operator plus b sigma_3",
        params: &[ParamSpec { name: "b", default: 0.5, description: "mass" }],
    },
    ModelInfo {
        name: "twisted",
        description: "A^1 = sigma_1 + 2 eps sin(x1) I, A^2 = sigma_2 + eps sin(x1) sigma_3, B = 0",
        params: &[ParamSpec { name: "eps", default: 0.1, description: "twist amplitude" }],
    },
];

fn c(r: f64, i: f64) -> Complex64 {
    Complex64::new(r, i)
}

pub fn pauli(k: usize) -> CMat {
    match k {
        0 => CMat::identity(2, 2),
        1 => CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
        2 => CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]),
        3 => CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]),
        _ => panic!("no Pauli matrix {k}"),
    }
}

/// Summary of the ellipticity and simplicity scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegistrationReport {
    pub m_minus: usize,
    pub m_plus: usize,
    pub min_abs_eigenvalue: f64,
    pub min_gap: f64,
    /// Largest `|grad_xi h|` over the grid.
    pub max_speed: f64,
}

#[derive(Clone, Debug)]
pub struct TorusModel {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub coeffs: Vec<TrigPolyMatrix>,
    pub sub: TrigPolyMatrix,
    pub registration: RegistrationReport,
}

impl TorusModel {
    /// Validates shapes and Hermiticity and scans ellipticity on the registration grid.
    pub fn new(name: &str, params: BTreeMap<String, f64>, coeffs: Vec<TrigPolyMatrix>, sub: TrigPolyMatrix) -> Result<Self> {
        let n = coeffs.len();
        if n < 2 {
            return Err(SpectralError::InvalidParameter("need at least two coefficients".into()));
        }
        let m = sub.matrix_dim();
        for a in coeffs.iter().chain(std::iter::once(&sub)) {
            if a.space_dim() != n || a.matrix_dim() != m {
                return Err(SpectralError::InvalidParameter("coefficient shapes differ".into()));
            }
            if a.hermitian_defect() > 1e-12 {
                return Err(SpectralError::InvalidParameter("coefficient is not Hermitian".into()));
            }
        }
        let mut model = TorusModel {
            name: name.to_string(),
            params,
            coeffs,
            sub,
            registration: RegistrationReport {
                m_minus: 0,
                m_plus: 0,
                min_abs_eigenvalue: 0.0,
                min_gap: 0.0,
                max_speed: 0.0,
            },
        };
        model.registration = model.scan(REGISTRATION_GRID.0, REGISTRATION_GRID.1)?;
        Ok(model)
    }

    pub fn space_dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn matrix_dim(&self) -> usize {
        self.sub.matrix_dim()
    }

    pub fn principal_at(&self, x: &[f64], xi: &[f64]) -> CMat {
        self.coeffs
            .iter()
            .zip(xi)
            .fold(CMat::zeros(self.matrix_dim(), self.matrix_dim()), |acc, (a, k)| acc + a.eval(x) * c(*k, 0.0))
    }

    /// Principal and subprincipal symbols with analytic derivatives.
    pub fn symbol_pair(&self) -> SymbolPair {
        let (n, m) = (self.space_dim(), self.matrix_dim());
        let coeffs = Arc::new(self.coeffs.clone());
        let eval = {
            let coeffs = coeffs.clone();
            move |p: &PhasePoint| {
                coeffs
                    .iter()
                    .zip(&p.xi)
                    .fold(CMat::zeros(m, m), |acc, (a, k)| acc + a.eval(&p.x) * c(*k, 0.0))
            }
        };
        let jet = move |p: &PhasePoint| {
            let mut value = CMat::zeros(m, m);
            let mut dx = vec![CMat::zeros(m, m); n];
            let mut dxi = Vec::with_capacity(n);
            for (a, k) in coeffs.iter().zip(&p.xi) {
                let (v, g) = a.eval_grad(&p.x);
                value += &v * c(*k, 0.0);
                for (d, gb) in dx.iter_mut().zip(&g) {
                    *d += gb * c(*k, 0.0);
                }
                dxi.push(v);
            }
            MatrixJet { value, dx, dxi }
        };
        let principal = SymbolField::new(m, n, 1, eval).with_jet(jet);
        let sub = self.sub.clone();
        let subf = SymbolField::new(m, n, 0, move |p: &PhasePoint| sub.eval(&p.x));
        SymbolPair::new(principal, subf).expect("shapes checked at construction")
    }

    fn scan(&self, nx: usize, ntheta: usize) -> Result<RegistrationReport> {
        let n = self.space_dim();
        if n != 2 {
            return Err(SpectralError::InvalidParameter(format!("registration scan needs n = 2, got {n}")));
        }
        let golden = 0.5 * (5f64.sqrt() - 1.0);
        let mut report: Option<RegistrationReport> = None;
        for i in 0..nx {
            let x = [2.0 * PI * i as f64 / nx as f64, 2.0 * PI * (i as f64 * golden).fract()];
            let ca: Vec<CMat> = self.coeffs.iter().map(|a| a.eval(&x)).collect();
            for k in 0..ntheta {
                let t = 2.0 * PI * k as f64 / ntheta as f64;
                let a = &ca[0] * c(t.cos(), 0.0) + &ca[1] * c(t.sin(), 0.0);
                let d = eigen_decompose(&a, None).map_err(|e| {
                    SpectralError::EllipticityViolation(format!("at x = ({:.4}, {:.4}), theta = {t:.4}: {e}", x[0], x[1]))
                })?;
                let speed = d
                    .sheets
                    .iter()
                    .map(|s| {
                        let vs = s.vector.adjoint();
                        ca.iter()
                            .map(|cb| (&vs * cb * &s.vector)[(0, 0)].re.powi(2))
                            .sum::<f64>()
                            .sqrt()
                    })
                    .fold(0.0, f64::max);
                let min_abs = d.sheets.iter().map(|s| s.value.abs()).fold(f64::INFINITY, f64::min);
                let r = report.get_or_insert(RegistrationReport {
                    m_minus: d.m_minus,
                    m_plus: d.m_plus,
                    min_abs_eigenvalue: f64::INFINITY,
                    min_gap: f64::INFINITY,
                    max_speed: 0.0,
                });
                if d.m_minus != r.m_minus {
                    return Err(SpectralError::EllipticityViolation(format!(
                        "number of negative eigenvalues changes at x = ({:.4}, {:.4}), theta = {t:.4}",
                        x[0], x[1]
                    )));
                }
                r.min_abs_eigenvalue = r.min_abs_eigenvalue.min(min_abs);
                r.min_gap = r.min_gap.min(d.min_gap);
                r.max_speed = r.max_speed.max(speed);
            }
        }
        Ok(report.expect("nonempty grid"))
    }

    /// Lower bound `2 pi / max |grad_xi h|` on the period of closed
    /// characteristic loops winding around the torus.
    pub fn loop_time_bound(&self) -> f64 {
        2.0 * PI / self.registration.max_speed
    }

    /// Nonzero Fourier modes through which the operator couples plane waves.
    pub fn coupling_modes(&self) -> Vec<Vec<i32>> {
        let mut modes: Vec<Vec<i32>> = self
            .coeffs
            .iter()
            .chain(std::iter::once(&self.sub))
            .flat_map(|a| a.terms().map(|(q, _)| q.clone()))
            .filter(|q| q.iter().any(|v| *v != 0))
            .collect();
        modes.sort();
        modes.dedup();
        modes
    }
}

fn take_params(name: &str, info: &ModelInfo, given: &BTreeMap<String, f64>) -> Result<BTreeMap<String, f64>> {
    for (k, v) in given {
        if !info.params.iter().any(|p| p.name == k) {
            return Err(SpectralError::InvalidParameter(format!("model '{name}' has no parameter '{k}'")));
        }
        if !v.is_finite() {
            return Err(SpectralError::InvalidParameter(format!("{k} = {v}")));
        }
    }
    Ok(info
        .params
        .iter()
        .map(|p| (p.name.to_string(), *given.get(p.name).unwrap_or(&p.default)))
        .collect())
}

/// Instantiate a catalog model.
pub fn build_model(name: &str, params: &BTreeMap<String, f64>) -> Result<TorusModel> {
    let info = CATALOG
        .iter()
        .find(|m| m.name == name)
        .ok_or_else(|| SpectralError::UnknownModel(name.to_string()))?;
    let p = take_params(name, info, params)?;
    let n = 2;
    let mut a1 = TrigPolyMatrix::constant(pauli(1), n);
    let mut a2 = TrigPolyMatrix::constant(pauli(2), n);
    let sub = match name {
        "dirac" => TrigPolyMatrix::zero(2, n),
        "shifted-dirac" => TrigPolyMatrix::constant(pauli(0) * c(p["beta"], 0.0), n),
        "mass-dirac" => TrigPolyMatrix::constant(pauli(3) * c(p["b"], 0.0), n),
        "twisted" => {
            let eps = p["eps"];
            a1 = a1.plus(&TrigPolyMatrix::sine(&(pauli(0) * c(2.0 * eps, 0.0)), 0, n));
            a2 = a2.plus(&TrigPolyMatrix::sine(&(pauli(3) * c(eps, 0.0)), 0, n));
            TrigPolyMatrix::zero(2, n)
        }
        _ => unreachable!("catalog entry without constructor"),
    };
    TorusModel::new(name, p, vec![a1, a2], sub)
}
