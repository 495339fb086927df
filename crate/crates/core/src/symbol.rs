//! Matrix-valued symbols on phase space and their first-order jets.
//!
//! A [`SymbolField`] is a smooth map `(x, xi) -> C^{m x m}` that is positively
//! homogeneous in `xi`. Derivatives come either from an analytic jet supplied
//! by the caller or from five-point central differences.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;

/// Default finite-difference step (absolute in `x`, relative to `|xi|` in `xi`).
pub const DEFAULT_FD_STEP: f64 = 1e-3;

/// A point `(x, xi)` of `T*M` minus the zero section.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, xi: Vec<f64>) -> Result<Self> {
        if x.len() != xi.len() {
            return Err(Error::InvalidPoint(format!(
                "x has {} components, xi has {}",
                x.len(),
                xi.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::InvalidPoint("dimension must be at least 2".into()));
        }
        if x.iter().chain(xi.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        let p = PhasePoint { x, xi };
        if p.xi_norm() == 0.0 {
            return Err(Error::InvalidPoint("xi = 0".into()));
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn xi_norm(&self) -> f64 {
        self.xi.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Same base point with `xi` rescaled to unit length.
    pub fn normalized(&self) -> PhasePoint {
        let r = self.xi_norm();
        PhasePoint {
            x: self.x.clone(),
            xi: self.xi.iter().map(|v| v / r).collect(),
        }
    }

    pub fn with_xi(&self, xi: Vec<f64>) -> PhasePoint {
        PhasePoint { x: self.x.clone(), xi }
    }

    pub fn shifted(&self, dir: Direction, h: f64) -> PhasePoint {
        let mut p = self.clone();
        match dir {
            Direction::X(a) => p.x[a] += h,
            Direction::Xi(a) => p.xi[a] += h,
        }
        p
    }
}

/// A coordinate direction on phase space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    X(usize),
    Xi(usize),
}

/// Value and first partial derivatives of a matrix function on phase space.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixJet {
    pub value: CMat,
    pub dx: Vec<CMat>,
    pub dxi: Vec<CMat>,
}

impl MatrixJet {
    pub fn constant(value: CMat, n: usize) -> Self {
        let zero = CMat::zeros(value.nrows(), value.ncols());
        MatrixJet {
            value,
            dx: vec![zero.clone(); n],
            dxi: vec![zero; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.dx.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.value.shape()
    }

    pub fn derivative(&self, dir: Direction) -> &CMat {
        match dir {
            Direction::X(a) => &self.dx[a],
            Direction::Xi(a) => &self.dxi[a],
        }
    }

    /// Conjugate transpose of the jet.
    pub fn adjoint(&self) -> MatrixJet {
        MatrixJet {
            value: self.value.adjoint(),
            dx: self.dx.iter().map(|d| d.adjoint()).collect(),
            dxi: self.dxi.iter().map(|d| d.adjoint()).collect(),
        }
    }

    /// Jet of the product `self * other` by the Leibniz rule.
    pub fn mul(&self, other: &MatrixJet) -> MatrixJet {
        let leib = |a: &CMat, b: &CMat| a * &other.value + &self.value * b;
        MatrixJet {
            value: &self.value * &other.value,
            dx: self.dx.iter().zip(&other.dx).map(|(a, b)| leib(a, b)).collect(),
            dxi: self.dxi.iter().zip(&other.dxi).map(|(a, b)| leib(a, b)).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> MatrixJet {
        MatrixJet {
            value: &self.value * c,
            dx: self.dx.iter().map(|d| d * c).collect(),
            dxi: self.dxi.iter().map(|d| d * c).collect(),
        }
    }

    /// Largest entrywise distance between two jets of equal shape.
    pub fn max_abs_diff(&self, other: &MatrixJet) -> f64 {
        let d = |a: &CMat, b: &CMat| max_abs(&(a - b));
        let mut m = d(&self.value, &other.value);
        for (a, b) in self.dx.iter().zip(&other.dx).chain(self.dxi.iter().zip(&other.dxi)) {
            m = m.max(d(a, b));
        }
        m
    }
}

type EvalFn = dyn Fn(&PhasePoint) -> CMat + Send + Sync;
type JetFn = dyn Fn(&PhasePoint) -> MatrixJet + Send + Sync;

/// Matrix-valued symbol of a fixed homogeneity degree in `xi`.
#[derive(Clone)]
pub struct SymbolField {
    m: usize,
    n: usize,
    degree: i32,
    eval: Arc<EvalFn>,
    jet: Option<Arc<JetFn>>,
}

impl fmt::Debug for SymbolField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymbolField")
            .field("m", &self.m)
            .field("n", &self.n)
            .field("degree", &self.degree)
            .field("analytic_jet", &self.jet.is_some())
            .finish()
    }
}

impl SymbolField {
    pub fn new<F>(m: usize, n: usize, degree: i32, eval: F) -> Self
    where
        F: Fn(&PhasePoint) -> CMat + Send + Sync + 'static,
    {
        SymbolField {
            m,
            n,
            degree,
            eval: Arc::new(eval),
            jet: None,
        }
    }

    /// Attach analytic first derivatives.
    pub fn with_jet<G>(mut self, jet: G) -> Self
    where
        G: Fn(&PhasePoint) -> MatrixJet + Send + Sync + 'static,
    {
        self.jet = Some(Arc::new(jet));
        self
    }

    pub fn matrix_dim(&self) -> usize {
        self.m
    }

    pub fn space_dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn has_analytic_jet(&self) -> bool {
        self.jet.is_some()
    }

    fn check_point(&self, p: &PhasePoint) -> Result<()> {
        if p.dim() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "point has dimension {}, symbol expects {}",
                p.dim(),
                self.n
            )));
        }
        Ok(())
    }

    pub fn eval(&self, p: &PhasePoint) -> Result<CMat> {
        self.check_point(p)?;
        let a = (self.eval)(p);
        if a.shape() != (self.m, self.m) {
            return Err(Error::DimensionMismatch(format!(
                "symbol returned {:?}, expected {}x{}",
                a.shape(),
                self.m,
                self.m
            )));
        }
        Ok(a)
    }

    /// Analytic jet when available, otherwise finite differences.
    pub fn jet(&self, p: &PhasePoint, step: f64) -> Result<MatrixJet> {
        self.check_point(p)?;
        match &self.jet {
            Some(g) => Ok(g(p)),
            None => symbol_jet(self, p, step),
        }
    }

    /// The symbol `-A`.
    pub fn negated(&self) -> SymbolField {
        let f = self.eval.clone();
        let mut out = SymbolField::new(self.m, self.n, self.degree, move |p| -f(p));
        if let Some(g) = self.jet.clone() {
            out = out.with_jet(move |p| g(p).scale(Complex64::new(-1.0, 0.0)));
        }
        out
    }

    /// Largest relative deviation from `A(x, l xi) = l^d A(x, xi)` over `scales`.
    pub fn homogeneity_defect(&self, p: &PhasePoint, scales: &[f64]) -> Result<f64> {
        let a = self.eval(p)?;
        let norm = max_abs(&a).max(1e-300);
        let mut worst: f64 = 0.0;
        for &l in scales {
            let q = p.with_xi(p.xi.iter().map(|v| v * l).collect());
            let b = self.eval(&q)?;
            let expected = &a * Complex64::new(l.powi(self.degree), 0.0);
            worst = worst.max(max_abs(&(b - expected)) / (norm * l.powi(self.degree).abs()));
        }
        Ok(worst)
    }
}

/// Principal symbol (degree 1) together with the subprincipal symbol (degree 0).
#[derive(Clone, Debug)]
pub struct SymbolPair {
    pub principal: SymbolField,
    pub sub: SymbolField,
}

impl SymbolPair {
    pub fn new(principal: SymbolField, sub: SymbolField) -> Result<Self> {
        if principal.degree() != 1 || sub.degree() != 0 {
            return Err(Error::InvalidArgument(format!(
                "expected degrees (1, 0), got ({}, {})",
                principal.degree(),
                sub.degree()
            )));
        }
        if principal.matrix_dim() != sub.matrix_dim() || principal.space_dim() != sub.space_dim() {
            return Err(Error::DimensionMismatch(
                "principal and subprincipal symbols differ in shape".into(),
            ));
        }
        Ok(SymbolPair { principal, sub })
    }

    pub fn matrix_dim(&self) -> usize {
        self.principal.matrix_dim()
    }

    pub fn space_dim(&self) -> usize {
        self.principal.space_dim()
    }

    /// The pair describing the operator `-A`.
    pub fn negated(&self) -> SymbolPair {
        SymbolPair {
            principal: self.principal.negated(),
            sub: self.sub.negated(),
        }
    }
}

/// Five-point central difference from samples at `-2h, -h, h, 2h`.
pub(crate) fn stencil_mat(s: [&CMat; 4], h: f64) -> CMat {
    let c = Complex64::new(1.0 / (12.0 * h), 0.0);
    (s[0] - s[1] * Complex64::new(8.0, 0.0) + s[2] * Complex64::new(8.0, 0.0) - s[3]) * c
}

pub(crate) fn stencil_f64(s: [f64; 4], h: f64) -> f64 {
    (s[0] - 8.0 * s[1] + 8.0 * s[2] - s[3]) / (12.0 * h)
}

/// Step used along `dir`: absolute in `x`, relative to `|xi|` in `xi`.
pub(crate) fn step_for(p: &PhasePoint, dir: Direction, step: f64) -> f64 {
    match dir {
        Direction::X(_) => step,
        Direction::Xi(_) => step * p.xi_norm(),
    }
}

pub(crate) const STENCIL: [f64; 4] = [-2.0, -1.0, 1.0, 2.0];

/// Finite-difference jet of a symbol field, accurate to fourth order in `step`.
pub fn symbol_jet(field: &SymbolField, p: &PhasePoint, step: f64) -> Result<MatrixJet> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!("step {step}")));
    }
    field.check_point(p)?;
    let n = p.dim();
    let value = field.eval(p)?;
    let d = |dir: Direction| -> Result<CMat> {
        let h = step_for(p, dir, step);
        let s = STENCIL
            .iter()
            .map(|k| field.eval(&p.shifted(dir, k * h)))
            .collect::<Result<Vec<_>>>()?;
        Ok(stencil_mat([&s[0], &s[1], &s[2], &s[3]], h))
    };
    let dx = (0..n).map(|a| d(Direction::X(a))).collect::<Result<Vec<_>>>()?;
    let dxi = (0..n).map(|a| d(Direction::Xi(a))).collect::<Result<Vec<_>>>()?;
    Ok(MatrixJet { value, dx, dxi })
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Relative distance of `a` from its adjoint.
pub fn hermitian_deviation(a: &CMat) -> f64 {
    let scale = max_abs(a).max(1.0);
    max_abs(&(a - a.adjoint())) / scale
}

pub fn trace(a: &CMat) -> Complex64 {
    a.diagonal().iter().sum()
}
