//! Local Weyl coefficients computed directly from the symbols.
//!
//! For a sheet `h` and a function `q` homogeneous of degree zero in `xi`,
//! `int_{|h| < 1} q dxi = (1/n) int_{S^{n-1}} q(w) |h(x, w)|^{-n} dw`.
//! The first coefficient is `n (2 pi)^{-n} sum_j vol{|h_j| < 1}` and the
//! second is `-n (n-1) (2 pi)^{-n} sum_j int_{h_j < 1} q_j` with
//! `q_j = v* B v - (i/2) {v*, A - h, v} + i/(n-1) h {v*, v}`.
//! Coefficients of the negative branch are those of `-A`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bracket::generalized_bracket;
use crate::eigen::{eigen_decompose, eigen_jet_with, EigenJet, JetOptions, SheetJet};
use crate::error::{Error, Result};
use crate::quadrature::{pairwise_sum, CosphereQuadrature};
use crate::symbol::{trace, CMat, PhasePoint, SymbolField, SymbolPair};

/// Tolerance on imaginary residues of quantities that must be real.
pub const IMAG_TOL: f64 = 1e-6;

/// Gauge-invariant scalars entering the second coefficient, in both the
/// eigenvector and the projection form.
#[derive(Clone, Copy, Debug)]
pub struct IntegrandTerms {
    /// `v* B v`
    pub sub: Complex64,
    /// `{v*, A - h, v}`
    pub bracket: Complex64,
    /// `{v*, v}`
    pub curvature: Complex64,
    /// `tr(B P)`
    pub sub_proj: Complex64,
    /// `tr{P, A - h, P}`
    pub bracket_proj: Complex64,
    /// `tr{P, P, P}`
    pub curvature_proj: Complex64,
}

impl IntegrandTerms {
    /// Largest mismatch between the eigenvector and projection forms
    /// (`tr{P,P,P} = -{v*, v}`).
    pub fn projection_defect(&self) -> f64 {
        (self.sub - self.sub_proj)
            .norm()
            .max((self.bracket - self.bracket_proj).norm())
            .max((self.curvature + self.curvature_proj).norm())
    }
}

/// Integrand scalars of sheet `s` given the subprincipal matrix `sub` at the same point.
pub fn integrand_terms(jet: &EigenJet, s: &SheetJet, sub: &CMat) -> Result<IntegrandTerms> {
    let m = jet.symbol.value.nrows();
    let shifted = &jet.symbol.value - CMat::identity(m, m) * Complex64::new(s.h, 0.0);
    let vstar = s.v.adjoint();
    let ident = DMatrix::identity(m, m);
    Ok(IntegrandTerms {
        sub: (&vstar.value * sub * &s.v.value)[(0, 0)],
        bracket: generalized_bracket(&vstar, &shifted, &s.v)?[(0, 0)],
        curvature: generalized_bracket(&vstar, &ident, &s.v)?[(0, 0)],
        sub_proj: trace(&(sub * &s.p.value)),
        bracket_proj: trace(&generalized_bracket(&s.p, &shifted, &s.p)?),
        curvature_proj: trace(&generalized_bracket(&s.p, &s.p.value, &s.p)?),
    })
}

/// How the curvature term is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CurvatureForm {
    /// `-tr{P, P, P}`, independent of eigenvector phases.
    #[default]
    Projection,
    /// `{v*, v}` from the eigenvector jet.
    Eigenvector,
}

#[derive(Clone, Debug)]
pub struct WeylOptions {
    pub jet: JetOptions,
    pub curvature: CurvatureForm,
}

impl Default for WeylOptions {
    fn default() -> Self {
        WeylOptions {
            jet: JetOptions::default(),
            curvature: CurvatureForm::Projection,
        }
    }
}

/// Contribution of one sheet. The `term_*` fields add up to the second
/// coefficient of the branch of the sheet's sign.
#[derive(Clone, Debug, PartialEq)]
pub struct SheetContribution {
    pub index: i32,
    /// `vol{|h| < 1}` in the fibre over `x`.
    pub volume: f64,
    pub first: f64,
    pub term_sub: f64,
    pub term_bracket: f64,
    pub term_curv: f64,
}

impl SheetContribution {
    pub fn second(&self) -> f64 {
        self.term_sub + self.term_bracket + self.term_curv
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeylCoefficients {
    pub x: Vec<f64>,
    pub first_plus: f64,
    pub first_minus: f64,
    pub second_plus: f64,
    pub second_minus: f64,
    pub sheets: Vec<SheetContribution>,
}

fn unit_point(x: &[f64], w: &[f64]) -> Result<PhasePoint> {
    PhasePoint::new(x.to_vec(), w.to_vec())
}

fn check_dims(field: &SymbolField, x: &[f64], quad: &CosphereQuadrature) -> Result<()> {
    if x.len() != field.space_dim() || quad.n != field.space_dim() {
        return Err(Error::DimensionMismatch(format!(
            "x has {} components, quadrature is on S^{}, symbol on R^{}",
            x.len(),
            quad.n - 1,
            field.space_dim()
        )));
    }
    Ok(())
}

/// `int_{|h_j| < 1} q dxi` for `q` homogeneous of degree zero.
pub fn region_integral<F>(
    field: &SymbolField,
    x: &[f64],
    j: i32,
    q: F,
    quad: &CosphereQuadrature,
    simplicity_tol: Option<f64>,
) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    check_dims(field, x, quad)?;
    let n = x.len() as i32;
    let total = quad.integrate(|w| {
        let d = eigen_decompose(&field.eval(&unit_point(x, w)?)?, simplicity_tol)?;
        let s = d
            .sheet(j)
            .ok_or_else(|| Error::InvalidArgument(format!("no sheet {j}")))?;
        Ok(q(w)? * s.value.abs().powi(-n))
    })?;
    Ok(total / n as f64)
}

/// First coefficients `(a+, a-)` and the per-sheet volumes `vol{|h_j| < 1}`.
pub fn first_weyl(
    field: &SymbolField,
    x: &[f64],
    quad: &CosphereQuadrature,
    simplicity_tol: Option<f64>,
) -> Result<(f64, f64, Vec<(i32, f64)>)> {
    check_dims(field, x, quad)?;
    let n = x.len();
    let probe = eigen_decompose(&field.eval(&unit_point(x, &quad.nodes[0])?)?, simplicity_tol)?;
    let mut vols = Vec::new();
    let (mut plus, mut minus) = (0.0, 0.0);
    for s in &probe.sheets {
        let v = region_integral(field, x, s.index, |_| Ok(1.0), quad, simplicity_tol)?;
        let a = n as f64 * v / (2.0 * PI).powi(n as i32);
        if s.index > 0 {
            plus += a;
        } else {
            minus += a;
        }
        vols.push((s.index, v));
    }
    Ok((plus, minus, vols))
}

fn real(z: Complex64, scale: f64) -> Result<f64> {
    if z.im.abs() > IMAG_TOL * scale.max(1.0) {
        return Err(Error::ComplexResidue(z.im));
    }
    Ok(z.re)
}

/// Both local Weyl coefficients of both branches at `x`.
pub fn second_weyl(
    pair: &SymbolPair,
    x: &[f64],
    quad: &CosphereQuadrature,
    opts: &WeylOptions,
) -> Result<WeylCoefficients> {
    check_dims(&pair.principal, x, quad)?;
    let n = x.len();
    let nf = n as f64;
    let m = pair.matrix_dim();
    let i = Complex64::new(0.0, 1.0);

    // Per node and sheet: weight * |h|^{-n} * (1, sub, bracket, curvature).
    let mut rows: Vec<Vec<[Complex64; 4]>> = vec![Vec::with_capacity(quad.len()); m];
    let mut labels: Option<Vec<i32>> = None;
    for (w, wt) in quad.nodes.iter().zip(&quad.weights) {
        let p = unit_point(x, w)?;
        let jet = eigen_jet_with(&pair.principal, &p, &opts.jet)?;
        let sub = pair.sub.eval(&p)?;
        let idx: Vec<i32> = jet.sheets.iter().map(|s| s.index).collect();
        match &labels {
            None => labels = Some(idx),
            Some(l) if *l != idx => {
                return Err(Error::NotElliptic("sheet signature varies over the cosphere".into()))
            }
            _ => {}
        }
        for (k, s) in jet.sheets.iter().enumerate() {
            let t = integrand_terms(&jet, s, &sub)?;
            let curv = match opts.curvature {
                CurvatureForm::Projection => -t.curvature_proj,
                CurvatureForm::Eigenvector => t.curvature,
            };
            let mu = wt * s.h.abs().powi(-(n as i32));
            rows[k].push([
                Complex64::new(mu, 0.0),
                t.sub * mu,
                t.bracket * (-0.5 * i) * mu,
                curv * (-i * s.h) * mu,
            ]);
        }
    }
    let labels = labels.unwrap_or_default();
    let norm = (2.0 * PI).powi(-(n as i32));
    let mut out = WeylCoefficients {
        x: x.to_vec(),
        first_plus: 0.0,
        first_minus: 0.0,
        second_plus: 0.0,
        second_minus: 0.0,
        sheets: Vec::with_capacity(m),
    };
    for (k, &j) in labels.iter().enumerate() {
        let col = |c: usize| -> Result<f64> {
            let re: Vec<f64> = rows[k].iter().map(|r| r[c].re).collect();
            let im: Vec<f64> = rows[k].iter().map(|r| r[c].im).collect();
            let scale = rows[k].iter().map(|r| r[c].norm()).sum::<f64>();
            real(Complex64::new(pairwise_sum(&re), pairwise_sum(&im)), scale)
        };
        let sign = if j > 0 { 1.0 } else { -1.0 };
        let volume = col(0)? / nf;
        let c = SheetContribution {
            index: j,
            volume,
            first: nf * volume * norm,
            term_sub: -sign * (nf - 1.0) * norm * col(1)?,
            term_bracket: -sign * (nf - 1.0) * norm * col(2)?,
            term_curv: sign * norm * col(3)?,
        };
        if j > 0 {
            out.first_plus += c.first;
            out.second_plus += c.second();
        } else {
            out.first_minus += c.first;
            out.second_minus += c.second();
        }
        out.sheets.push(c);
    }
    Ok(out)
}
