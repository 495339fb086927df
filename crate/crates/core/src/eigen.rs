//! Pointwise eigen-decomposition of a Hermitian principal symbol and the
//! first-order jets of its eigenvalues, eigenvectors and eigenprojections.
//!
//! Sheets are labelled by nonzero integers: negative eigenvalues get
//! `-m_minus..=-1` in increasing order and positive ones get `1..=m_plus`.
//! Eigenvectors are normalized and their phase fixed so that the
//! largest-magnitude component is real and positive (lowest index on ties).
//!
//! Individual eigenvector derivatives depend on the gauge. Downstream code
//! only combines them into gauge-invariant scalars; the vector jets are
//! nonetheless exposed so that this invariance can be tested.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::symbol::{
    hermitian_deviation, max_abs, stencil_f64, stencil_mat, step_for, CMat, Direction, MatrixJet,
    PhasePoint, SymbolField, STENCIL,
};

/// Relative Hermiticity tolerance applied before decomposing.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Default relative simplicity tolerance (times the spectral radius).
pub const DEFAULT_SIMPLICITY_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct Sheet {
    pub index: i32,
    pub value: f64,
    /// Unit eigenvector as an `m x 1` matrix.
    pub vector: CMat,
}

impl Sheet {
    pub fn projection(&self) -> CMat {
        &self.vector * self.vector.adjoint()
    }
}

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub sheets: Vec<Sheet>,
    pub m_minus: usize,
    pub m_plus: usize,
    /// Smallest distance between distinct eigenvalues or from an eigenvalue to zero.
    pub min_gap: f64,
}

impl EigenDecomposition {
    pub fn sheet(&self, j: i32) -> Option<&Sheet> {
        self.sheets.iter().find(|s| s.index == j)
    }
}

/// Sheet label of the `k`-th eigenvalue in increasing order.
pub fn sheet_index(k: usize, m_minus: usize) -> i32 {
    if k < m_minus {
        k as i32 - m_minus as i32
    } else {
        (k - m_minus) as i32 + 1
    }
}

fn phase_normalize(v: &mut CMat) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let big = v.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let pivot = v
        .iter()
        .position(|z| z.norm() >= big * (1.0 - 1e-12))
        .unwrap_or(0);
    let z = v[pivot];
    let rot = z.conj() / (z.norm() * norm);
    v.iter_mut().for_each(|c| *c *= rot);
}

/// Eigen-decomposition with sheet labelling and simplicity checks.
///
/// `simplicity_tol` is relative to the spectral radius and defaults to
/// [`DEFAULT_SIMPLICITY_TOL`].
pub fn eigen_decompose(a: &CMat, simplicity_tol: Option<f64>) -> Result<EigenDecomposition> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("matrix shape {:?}", a.shape())));
    }
    let dev = hermitian_deviation(a);
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let herm = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let m = a.nrows();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let radius = values.iter().fold(0.0f64, |r, v| r.max(v.abs()));
    let tol = simplicity_tol.unwrap_or(DEFAULT_SIMPLICITY_TOL) * radius.max(f64::MIN_POSITIVE);
    let mut min_gap = f64::INFINITY;
    for v in &values {
        if v.abs() <= tol {
            return Err(Error::NotElliptic(format!("eigenvalue {v:.3e} at zero")));
        }
        min_gap = min_gap.min(v.abs());
    }
    for w in values.windows(2) {
        if w[1] - w[0] <= tol {
            return Err(Error::DegenerateSpectrum(w[0], w[1]));
        }
        min_gap = min_gap.min(w[1] - w[0]);
    }
    let m_minus = values.iter().filter(|v| **v < 0.0).count();
    let sheets = order
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let mut v = CMat::from_column_slice(m, 1, eig.eigenvectors.column(i).as_slice());
            phase_normalize(&mut v);
            Sheet {
                index: sheet_index(k, m_minus),
                value: values[k],
                vector: v,
            }
        })
        .collect();
    Ok(EigenDecomposition {
        sheets,
        m_minus,
        m_plus: m - m_minus,
        min_gap,
    })
}

/// First-order data of a single eigen-sheet.
#[derive(Clone, Debug)]
pub struct SheetJet {
    pub index: i32,
    pub h: f64,
    pub dh_x: Vec<f64>,
    pub dh_xi: Vec<f64>,
    /// Eigenvector jet, `m x 1`.
    pub v: MatrixJet,
    /// Eigenprojection jet, `m x m`.
    pub p: MatrixJet,
}

impl SheetJet {
    pub fn sign(&self) -> f64 {
        self.h.signum()
    }
}

/// Jets of all sheets of the principal symbol at one phase-space point.
#[derive(Clone, Debug)]
pub struct EigenJet {
    pub point: PhasePoint,
    /// Jet of the principal symbol itself.
    pub symbol: MatrixJet,
    pub sheets: Vec<SheetJet>,
    pub m_minus: usize,
    pub m_plus: usize,
    pub min_gap: f64,
}

impl EigenJet {
    pub fn sheet(&self, j: i32) -> Option<&SheetJet> {
        self.sheets.iter().find(|s| s.index == j)
    }

    pub fn positive(&self) -> impl Iterator<Item = &SheetJet> {
        self.sheets.iter().filter(|s| s.index > 0)
    }

    pub fn negative(&self) -> impl Iterator<Item = &SheetJet> {
        self.sheets.iter().filter(|s| s.index < 0)
    }

    /// Largest violation of `(dP^k) P^j + P^k dP^j = delta_kj dP^k` over all
    /// sheet pairs and coordinate directions.
    pub fn projection_identity_defect(&self) -> f64 {
        let n = self.point.dim();
        let mut worst: f64 = 0.0;
        for sk in &self.sheets {
            for sj in &self.sheets {
                for a in 0..n {
                    for (dk, dj) in [(&sk.p.dx[a], &sj.p.dx[a]), (&sk.p.dxi[a], &sj.p.dxi[a])] {
                        let mut lhs = dk * &sj.p.value + &sk.p.value * dj;
                        if sk.index == sj.index {
                            lhs -= dk;
                        }
                        worst = worst.max(max_abs(&lhs));
                    }
                }
            }
        }
        worst
    }
}

/// How eigen-derivatives are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum JetMethod {
    /// Differentiate the decomposition itself with five-point stencils.
    #[default]
    FiniteDifference,
    /// First-order perturbation theory applied to the jet of the symbol.
    Perturbative,
}

/// Phase convention for eigenvectors away from the base point.
#[derive(Clone, Default)]
pub enum Gauge {
    /// Perturbed eigenvectors are rotated to have real positive overlap with
    /// the base eigenvector.
    #[default]
    Aligned,
    /// The component that is largest at the base point is made real and
    /// positive everywhere, then multiplied by `exp(i phase(x, xi))`.
    Phase(Arc<dyn Fn(&PhasePoint) -> f64 + Send + Sync>),
}

impl fmt::Debug for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gauge::Aligned => write!(f, "Aligned"),
            Gauge::Phase(_) => write!(f, "Phase(..)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct JetOptions {
    pub step: f64,
    pub simplicity_tol: Option<f64>,
    pub method: JetMethod,
    pub gauge: Gauge,
}

impl Default for JetOptions {
    fn default() -> Self {
        JetOptions {
            step: crate::symbol::DEFAULT_FD_STEP,
            simplicity_tol: None,
            method: JetMethod::FiniteDifference,
            gauge: Gauge::Aligned,
        }
    }
}

/// Eigen-jet with default method and gauge.
pub fn eigen_jet(
    field: &SymbolField,
    p: &PhasePoint,
    step: f64,
    simplicity_tol: Option<f64>,
) -> Result<EigenJet> {
    eigen_jet_with(
        field,
        p,
        &JetOptions {
            step,
            simplicity_tol,
            ..JetOptions::default()
        },
    )
}

pub fn eigen_jet_with(field: &SymbolField, p: &PhasePoint, opts: &JetOptions) -> Result<EigenJet> {
    if field.degree() != 1 {
        return Err(Error::InvalidArgument("eigen-jets need a degree-one symbol".into()));
    }
    if !(opts.step > 0.0 && opts.step.is_finite()) {
        return Err(Error::InvalidArgument(format!("step {}", opts.step)));
    }
    match opts.method {
        JetMethod::FiniteDifference => fd_eigen_jet(field, p, opts),
        JetMethod::Perturbative => {
            if matches!(opts.gauge, Gauge::Phase(_)) {
                return Err(Error::Unsupported(
                    "phase gauges require finite-difference jets".into(),
                ));
            }
            perturbative_eigen_jet(field, p, opts)
        }
    }
}

fn fix_gauge(v: &mut CMat, base: &CMat, pivot: usize, gauge: &Gauge, q: &PhasePoint) -> Result<()> {
    match gauge {
        Gauge::Aligned => {
            let c = (base.adjoint() * &*v)[(0, 0)];
            if c.norm() < 0.5 {
                return Err(Error::GaugeAlignmentFailure(c.norm()));
            }
            let rot = c.conj() / c.norm();
            v.iter_mut().for_each(|z| *z *= rot);
        }
        Gauge::Phase(phase) => {
            let z = v[pivot];
            if z.norm() < 1e-3 {
                return Err(Error::GaugeAlignmentFailure(z.norm()));
            }
            let rot = z.conj() / z.norm() * Complex64::from_polar(1.0, phase(q));
            v.iter_mut().for_each(|c| *c *= rot);
        }
    }
    Ok(())
}

fn largest_component(v: &CMat) -> usize {
    let mut best = 0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > v[best].norm() * (1.0 + 1e-12) {
            best = i;
        }
    }
    best
}

fn fd_eigen_jet(field: &SymbolField, p: &PhasePoint, opts: &JetOptions) -> Result<EigenJet> {
    let n = p.dim();
    let base_a = field.eval(p)?;
    let base = eigen_decompose(&base_a, opts.simplicity_tol)?;
    let m = base.sheets.len();
    let pivots: Vec<usize> = base.sheets.iter().map(|s| largest_component(&s.vector)).collect();
    let mut base_vecs: Vec<CMat> = base.sheets.iter().map(|s| s.vector.clone()).collect();
    if let Gauge::Phase(_) = &opts.gauge {
        for (v, &piv) in base_vecs.iter_mut().zip(&pivots) {
            fix_gauge(v, &v.clone(), piv, &opts.gauge, p)?;
        }
    }

    struct Sample {
        a: CMat,
        h: Vec<f64>,
        v: Vec<CMat>,
    }
    let sample = |q: &PhasePoint| -> Result<Sample> {
        let a = field.eval(q)?;
        let d = eigen_decompose(&a, opts.simplicity_tol)?;
        if d.m_minus != base.m_minus {
            return Err(Error::NotElliptic("sheet count changes within the stencil".into()));
        }
        let mut v = Vec::with_capacity(m);
        for (k, s) in d.sheets.iter().enumerate() {
            let mut w = s.vector.clone();
            fix_gauge(&mut w, &base_vecs[k], pivots[k], &opts.gauge, q)?;
            v.push(w);
        }
        Ok(Sample {
            a,
            h: d.sheets.iter().map(|s| s.value).collect(),
            v,
        })
    };

    let mut a_jet = MatrixJet::constant(base_a.clone(), n);
    let mut dh = vec![(vec![0.0; n], vec![0.0; n]); m];
    let mut dv: Vec<(Vec<CMat>, Vec<CMat>)> =
        vec![(vec![CMat::zeros(m, 1); n], vec![CMat::zeros(m, 1); n]); m];
    let mut dp: Vec<(Vec<CMat>, Vec<CMat>)> =
        vec![(vec![CMat::zeros(m, m); n], vec![CMat::zeros(m, m); n]); m];

    for dir in (0..n).map(Direction::X).chain((0..n).map(Direction::Xi)) {
        let h = step_for(p, dir, opts.step);
        let s = STENCIL
            .iter()
            .map(|k| sample(&p.shifted(dir, k * h)))
            .collect::<Result<Vec<_>>>()?;
        let da = stencil_mat([&s[0].a, &s[1].a, &s[2].a, &s[3].a], h);
        let (slot, a) = match dir {
            Direction::X(a) => (0, a),
            Direction::Xi(a) => (1, a),
        };
        if slot == 0 {
            a_jet.dx[a] = da;
        } else {
            a_jet.dxi[a] = da;
        }
        for k in 0..m {
            let d_h = stencil_f64([s[0].h[k], s[1].h[k], s[2].h[k], s[3].h[k]], h);
            let d_v = stencil_mat([&s[0].v[k], &s[1].v[k], &s[2].v[k], &s[3].v[k]], h);
            let proj: Vec<CMat> = s.iter().map(|x| &x.v[k] * x.v[k].adjoint()).collect();
            let d_p = stencil_mat([&proj[0], &proj[1], &proj[2], &proj[3]], h);
            if slot == 0 {
                dh[k].0[a] = d_h;
                dv[k].0[a] = d_v;
                dp[k].0[a] = d_p;
            } else {
                dh[k].1[a] = d_h;
                dv[k].1[a] = d_v;
                dp[k].1[a] = d_p;
            }
        }
    }

    let sheets = base
        .sheets
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let v = base_vecs[k].clone();
            let (dvx, dvxi) = std::mem::take(&mut dv[k]);
            let (dpx, dpxi) = std::mem::take(&mut dp[k]);
            SheetJet {
                index: s.index,
                h: s.value,
                dh_x: dh[k].0.clone(),
                dh_xi: dh[k].1.clone(),
                p: MatrixJet {
                    value: &v * v.adjoint(),
                    dx: dpx,
                    dxi: dpxi,
                },
                v: MatrixJet {
                    value: v,
                    dx: dvx,
                    dxi: dvxi,
                },
            }
        })
        .collect();
    Ok(EigenJet {
        point: p.clone(),
        symbol: a_jet,
        sheets,
        m_minus: base.m_minus,
        m_plus: base.m_plus,
        min_gap: base.min_gap,
    })
}

fn perturbative_eigen_jet(field: &SymbolField, p: &PhasePoint, opts: &JetOptions) -> Result<EigenJet> {
    let n = p.dim();
    let a_jet = field.jet(p, opts.step)?;
    let base = eigen_decompose(&a_jet.value, opts.simplicity_tol)?;
    let m = base.sheets.len();
    let project = |da: &CMat, k: usize| -> (f64, CMat) {
        let sk = &base.sheets[k];
        let w = da * &sk.vector;
        let d_h = (sk.vector.adjoint() * &w)[(0, 0)].re;
        let mut d_v = CMat::zeros(m, 1);
        for (l, sl) in base.sheets.iter().enumerate() {
            if l != k {
                let c = (sl.vector.adjoint() * &w)[(0, 0)] / (sk.value - sl.value);
                d_v += &sl.vector * c;
            }
        }
        (d_h, d_v)
    };
    let sheets = base
        .sheets
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let v = s.vector.clone();
            let mut jet = SheetJet {
                index: s.index,
                h: s.value,
                dh_x: vec![0.0; n],
                dh_xi: vec![0.0; n],
                v: MatrixJet::constant(v.clone(), n),
                p: MatrixJet::constant(&v * v.adjoint(), n),
            };
            for a in 0..n {
                let (hx, vx) = project(&a_jet.dx[a], k);
                let (hxi, vxi) = project(&a_jet.dxi[a], k);
                jet.dh_x[a] = hx;
                jet.dh_xi[a] = hxi;
                jet.p.dx[a] = &vx * v.adjoint() + &v * vx.adjoint();
                jet.p.dxi[a] = &vxi * v.adjoint() + &v * vxi.adjoint();
                jet.v.dx[a] = vx;
                jet.v.dxi[a] = vxi;
            }
            jet
        })
        .collect();
    Ok(EigenJet {
        point: p.clone(),
        symbol: a_jet,
        sheets,
        m_minus: base.m_minus,
        m_plus: base.m_plus,
        min_gap: base.min_gap,
    })
}
