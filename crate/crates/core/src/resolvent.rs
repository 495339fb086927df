//! Symbol of the resolvent, traces of its powers, and recovery of the
//! second Weyl coefficient from the asymptotics of the density
//! `f(x, l e^{i phi}) ~ b_1(x, phi) l + b_0(x, phi)`.
//!
//! Integrals over `xi` factor into a cosphere integral with measure
//! `|h(x, w)|^{-n} dw` times a radial integral of a `g_n` function. The radial
//! factors are taken either in closed form or by quadrature.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::bracket::generalized_bracket;
use crate::eigen::{eigen_jet_with, EigenJet, JetOptions};
use crate::error::{Error, Result};
use crate::gn::{gn_integral_numeric, GnMoment};
use crate::quadrature::{pairwise_sum, CosphereQuadrature};
use crate::symbol::{trace, CMat, MatrixJet, PhasePoint, SymbolPair, DEFAULT_FD_STEP};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A spectral parameter off the real axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralParameter(Complex64);

impl SpectralParameter {
    pub fn new(z: Complex64) -> Result<Self> {
        if z.im == 0.0 || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::RealSpectralParameter);
        }
        Ok(SpectralParameter(z))
    }

    pub fn polar(lambda: f64, phi: f64) -> Result<Self> {
        Self::new(Complex64::from_polar(lambda, phi))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

/// Leading and subleading parts of the Weyl symbol of `(A - z)^{-1}`:
/// `R - R B R + (i/2) {R, A - z, R}` with `R = (A_1 - z)^{-1}`.
pub fn resolvent_symbol(pair: &SymbolPair, p: &PhasePoint, z: SpectralParameter, step: f64) -> Result<CMat> {
    let z = z.value();
    let a = pair.principal.jet(p, step)?;
    let m = pair.matrix_dim();
    let dev = crate::symbol::hermitian_deviation(&a.value);
    if dev > crate::eigen::HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let dist = a
        .value
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|h| (Complex64::new(*h, 0.0) - z).norm())
        .fold(f64::INFINITY, f64::min);
    if dist < 1e-12 * z.norm().max(1.0) {
        return Err(Error::SingularResolvent(dist));
    }
    let shifted = &a.value - CMat::identity(m, m) * z;
    let r = shifted
        .clone()
        .try_inverse()
        .ok_or(Error::SingularResolvent(dist))?;
    let dr = |da: &CMat| -(&r * da * &r);
    let rj = MatrixJet {
        value: r.clone(),
        dx: a.dx.iter().map(dr).collect(),
        dxi: a.dxi.iter().map(dr).collect(),
    };
    let b = pair.sub.eval(p)?;
    Ok(&r - &r * &b * &r + generalized_bracket(&rj, &shifted, &rj)? * (0.5 * I))
}

/// Per-sheet gauge-invariant traces `tr(B P)`, `tr{P, A - h, P}`, `tr{P, P, P}`.
pub fn sheet_traces(jet: &EigenJet, sub: &CMat) -> Result<Vec<(i32, f64, [Complex64; 3])>> {
    let m = jet.symbol.value.nrows();
    jet.sheets
        .iter()
        .map(|s| {
            let shifted = &jet.symbol.value - CMat::identity(m, m) * Complex64::new(s.h, 0.0);
            Ok((
                s.index,
                s.h,
                [
                    trace(&(sub * &s.p.value)),
                    trace(&generalized_bracket(&s.p, &shifted, &s.p)?),
                    trace(&generalized_bracket(&s.p, &s.p.value, &s.p)?),
                ],
            ))
        })
        .collect()
}

fn distance_check(jet: &EigenJet, z: Complex64) -> Result<()> {
    for s in &jet.sheets {
        let d = (Complex64::new(s.h, 0.0) - z).norm();
        if d < 1e-12 * z.norm().max(1.0) {
            return Err(Error::SingularResolvent(d));
        }
    }
    Ok(())
}

/// Matrix trace of the resolvent symbol written through eigen-sheets only.
pub fn trace_resolvent_symbol(jet: &EigenJet, sub: &CMat, z: SpectralParameter) -> Result<Complex64> {
    let z = z.value();
    distance_check(jet, z)?;
    let mut total = Complex64::new(0.0, 0.0);
    for (_, h, [t_sub, t_br, t_curv]) in sheet_traces(jet, sub)? {
        let w = Complex64::new(h, 0.0) - z;
        total += 1.0 / w - t_sub / (w * w) + 0.5 * I * t_br / (w * w) + I * t_curv / w;
    }
    Ok(total)
}

/// Trace of the symbol of `(A - z)^{1-n}` in explicit form.
pub fn power_trace_symbol(jet: &EigenJet, sub: &CMat, z: SpectralParameter, n: usize) -> Result<Complex64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("power exponent needs n >= 2, got {n}")));
    }
    Ok(resolvent_terms(jet, sub, z, n)?
        .iter()
        .map(|t| t.first + t.second())
        .sum())
}

/// `(1/(n-2)!) d^{n-2}/dz^{n-2}` of the trace formula, by a Cauchy integral on
/// a circle around `z` with `nodes` trapezoid points.
pub fn power_trace_cauchy(jet: &EigenJet, sub: &CMat, z: SpectralParameter, n: usize, nodes: usize) -> Result<Complex64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("power exponent needs n >= 2, got {n}")));
    }
    let z0 = z.value();
    let radius = 0.5
        * jet
            .sheets
            .iter()
            .map(|s| (Complex64::new(s.h, 0.0) - z0).norm())
            .fold(z0.im.abs(), f64::min);
    let k = (n - 2) as i32;
    let mut acc = Vec::with_capacity(nodes);
    for l in 0..nodes {
        let e = Complex64::from_polar(1.0, 2.0 * PI * l as f64 / nodes as f64);
        let w = z0 + e * radius;
        let f = trace_resolvent_symbol(jet, sub, SpectralParameter::new(w)?)?;
        acc.push(f * e.powi(-k) / radius.powi(k) / nodes as f64);
    }
    Ok(crate::quadrature::pairwise_sum_c(&acc))
}

/// Largest violation over all sheet triples of
/// `tr{Pk,Pj,Pl} = 2 d_kj d_jl tr{Pj,Pj,Pj} - d_kj tr{Pl,Pj,Pl} - d_jl tr{Pk,Pj,Pk} + d_kl tr{Pk,Pj,Pk}`.
pub fn triple_trace_defect(jet: &EigenJet) -> Result<f64> {
    let m = jet.sheets.len();
    let tr3 = |k: usize, j: usize, l: usize| -> Result<Complex64> {
        let (a, b, c) = (&jet.sheets[k].p, &jet.sheets[j].p.value, &jet.sheets[l].p);
        Ok(trace(&generalized_bracket(a, b, c)?))
    };
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut worst: f64 = 0.0;
    for k in 0..m {
        for j in 0..m {
            for l in 0..m {
                let rhs = 2.0 * delta(k, j) * delta(j, l) * tr3(j, j, j)?
                    - delta(k, j) * tr3(l, j, l)?
                    - delta(j, l) * tr3(k, j, k)?
                    + delta(k, l) * tr3(k, j, k)?;
                worst = worst.max((tr3(k, j, l)? - rhs).norm());
            }
        }
    }
    Ok(worst)
}

/// Homogeneous components of the power-trace symbol for one sheet.
#[derive(Clone, Copy, Debug)]
pub struct ResolventSymbolTerms {
    pub index: i32,
    /// `(h - z)^{1-n}`
    pub first: Complex64,
    /// `-(n-1) tr(B P) / (h - z)^n`
    pub second_sub: Complex64,
    /// `(i/2)(n-1) tr{P, A - h, P} / (h - z)^n`
    pub second_bracket: Complex64,
    /// `i tr{P, P, P} / (h - z)^{n-1}`
    pub second_curv: Complex64,
}

impl ResolventSymbolTerms {
    pub fn second(&self) -> Complex64 {
        self.second_sub + self.second_bracket + self.second_curv
    }
}

pub fn resolvent_terms(jet: &EigenJet, sub: &CMat, z: SpectralParameter, n: usize) -> Result<Vec<ResolventSymbolTerms>> {
    let z = z.value();
    distance_check(jet, z)?;
    let nf = n as f64;
    sheet_traces(jet, sub)?
        .into_iter()
        .map(|(index, h, [t_sub, t_br, t_curv])| {
            let w = Complex64::new(h, 0.0) - z;
            let p1 = w.powi(1 - n as i32);
            let p0 = w.powi(-(n as i32));
            Ok(ResolventSymbolTerms {
                index,
                first: p1,
                second_sub: -(nf - 1.0) * t_sub * p0,
                second_bracket: 0.5 * I * (nf - 1.0) * t_br * p0,
                second_curv: I * t_curv * p1,
            })
        })
        .collect()
}

/// Closed-form radial factor multiplying the cosphere part of `b_0` for a
/// sheet of sign `sign`: `-2(pi - phi)` for positive sheets and
/// `(-1)^n 2 phi` for negative ones.
pub fn radial_factor_second(phi: f64, n: usize, sign: f64) -> Result<f64> {
    check_angle(phi)?;
    Ok(if sign > 0.0 {
        -2.0 * (PI - phi)
    } else {
        parity(n) * 2.0 * phi
    })
}

/// Closed-form radial factor of `b_1`: `-4 (n-1) ln2 sin(phi) sign^n`.
pub fn radial_factor_first(phi: f64, n: usize, sign: f64) -> Result<f64> {
    check_angle(phi)?;
    let s = if sign > 0.0 { 1.0 } else { parity(n) };
    Ok(-4.0 * (n as f64 - 1.0) * LN_2 * phi.sin() * s)
}

fn parity(n: usize) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check_angle(phi: f64) -> Result<()> {
    if !(phi > 0.0 && phi < PI) {
        return Err(Error::AngleOutOfRange(phi));
    }
    Ok(())
}

/// Which radial integral is meant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadialPart {
    /// `i int g_{n-1}(mu, e^{i phi}) mu^{n-1}`, the factor of `b_1`.
    First,
    /// `i int g_n(mu, e^{i phi}) mu^{n-1}`, from the subprincipal and bracket terms.
    SecondMain,
    /// `i int g_{n-1}(mu, e^{i phi}) mu^{n-2}`, from the curvature term.
    SecondCurvature,
}

/// Numerical radial factor for a sheet of the given sign.
pub fn radial_profile_signed(phi: f64, n: usize, part: RadialPart, sign: f64, rel_tol: f64) -> Result<f64> {
    check_angle(phi)?;
    if n < 2 {
        return Err(Error::InvalidArgument(format!("dimension {n}")));
    }
    let s = if sign > 0.0 { 1.0 } else { -1.0 };
    let z = Complex64::from_polar(s, phi);
    let nn = n as u32;
    let (order, moment, pow) = match part {
        RadialPart::First => (nn - 1, GnMoment::Equal, n - 1),
        RadialPart::SecondMain => (nn, GnMoment::OneLess, n),
        RadialPart::SecondCurvature => (nn - 1, GnMoment::OneLess, n - 1),
    };
    let v = I * gn_integral_numeric(order, z, moment, rel_tol)?.value * s.powi(pow as i32);
    if v.im.abs() > 1e-8 * v.norm().max(1.0) {
        return Err(Error::ComplexResidue(v.im));
    }
    Ok(v.re)
}

/// Numerical radial factor of a positive sheet; `k = 1` for the subprincipal
/// and bracket terms, `k = 2` for the curvature term.
pub fn radial_profile(phi: f64, n: usize, k: u8) -> Result<f64> {
    let part = match k {
        1 => RadialPart::SecondMain,
        2 => RadialPart::SecondCurvature,
        _ => return Err(Error::InvalidArgument(format!("radial term {k}"))),
    };
    radial_profile_signed(phi, n, part, 1.0, 1e-12)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RadialMethod {
    #[default]
    ClosedForm,
    Numeric,
}

#[derive(Clone, Debug)]
pub struct ResolventOptions {
    pub jet: JetOptions,
    pub radial: RadialMethod,
}

impl Default for ResolventOptions {
    fn default() -> Self {
        ResolventOptions {
            jet: JetOptions {
                step: DEFAULT_FD_STEP,
                ..JetOptions::default()
            },
            radial: RadialMethod::ClosedForm,
        }
    }
}

/// Cosphere parts of one sheet: `int |h|^{-n}`, and the two pieces of the
/// second coefficient density integrated against `|h|^{-n}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SheetAngular {
    pub index: i32,
    pub measure: f64,
    /// `-(n-1) int [tr(B P) - (i/2) tr{P, A - h, P}] |h|^{-n}`
    pub main: f64,
    /// `i int h tr{P, P, P} |h|^{-n}`
    pub curvature: f64,
}

/// Cosphere integrals for every sheet at `x`.
pub fn angular_parts(pair: &SymbolPair, x: &[f64], quad: &CosphereQuadrature, jet: &JetOptions) -> Result<Vec<SheetAngular>> {
    let n = pair.space_dim();
    if x.len() != n || quad.n != n {
        return Err(Error::DimensionMismatch("point, quadrature and symbol dimensions differ".into()));
    }
    let m = pair.matrix_dim();
    let mut cols: Vec<[Vec<Complex64>; 3]> = (0..m).map(|_| [Vec::new(), Vec::new(), Vec::new()]).collect();
    let mut labels = Vec::new();
    for (w, wt) in quad.nodes.iter().zip(&quad.weights) {
        let p = PhasePoint::new(x.to_vec(), w.clone())?;
        let ej = eigen_jet_with(&pair.principal, &p, jet)?;
        let sub = pair.sub.eval(&p)?;
        let tr = sheet_traces(&ej, &sub)?;
        let idx: Vec<i32> = tr.iter().map(|t| t.0).collect();
        if labels.is_empty() {
            labels = idx;
        } else if labels != idx {
            return Err(Error::NotElliptic("sheet signature varies over the cosphere".into()));
        }
        for (k, (_, h, [t_sub, t_br, t_curv])) in tr.into_iter().enumerate() {
            let mu = wt * h.abs().powi(-(n as i32));
            cols[k][0].push(Complex64::new(mu, 0.0));
            cols[k][1].push((t_sub - 0.5 * I * t_br) * (-(n as f64 - 1.0) * mu));
            cols[k][2].push(I * h * t_curv * mu);
        }
    }
    labels
        .iter()
        .enumerate()
        .map(|(k, &index)| {
            let sum = |c: &Vec<Complex64>| -> Result<f64> {
                let re: Vec<f64> = c.iter().map(|z| z.re).collect();
                let im: Vec<f64> = c.iter().map(|z| z.im).collect();
                let scale: f64 = c.iter().map(|z| z.norm()).sum();
                let v = Complex64::new(pairwise_sum(&re), pairwise_sum(&im));
                if v.im.abs() > crate::weyl::IMAG_TOL * scale.max(1.0) {
                    return Err(Error::ComplexResidue(v.im));
                }
                Ok(v.re)
            };
            Ok(SheetAngular {
                index,
                measure: sum(&cols[k][0])?,
                main: sum(&cols[k][1])?,
                curvature: sum(&cols[k][2])?,
            })
        })
        .collect()
}

/// The coefficients `b_1(x, phi)` and `b_0(x, phi)` with per-sheet parts.
#[derive(Clone, Debug, PartialEq)]
pub struct BCoefficients {
    pub phi: f64,
    pub b1: f64,
    pub b0: f64,
    /// `(sheet, b_1^(j), b_0^(j))`, without the `(2 pi)^{-n}` factor.
    pub sheets: Vec<(i32, f64, f64)>,
}

/// Combine precomputed cosphere parts with the radial factors at angle `phi`.
pub fn b_from_angular(angular: &[SheetAngular], n: usize, phi: f64, method: RadialMethod) -> Result<BCoefficients> {
    check_angle(phi)?;
    let norm = (2.0 * PI).powi(-(n as i32));
    let mut out = BCoefficients {
        phi,
        b1: 0.0,
        b0: 0.0,
        sheets: Vec::with_capacity(angular.len()),
    };
    for a in angular {
        let sign = if a.index > 0 { 1.0 } else { -1.0 };
        let (r1, d_main, d_curv) = match method {
            RadialMethod::ClosedForm => {
                let d = radial_factor_second(phi, n, sign)?;
                (radial_factor_first(phi, n, sign)?, d, d)
            }
            RadialMethod::Numeric => (
                radial_profile_signed(phi, n, RadialPart::First, sign, 1e-12)?,
                radial_profile_signed(phi, n, RadialPart::SecondMain, sign, 1e-12)?,
                // The curvature numerator carries one power of h: h tr{P,P,P} / h.
                sign * radial_profile_signed(phi, n, RadialPart::SecondCurvature, sign, 1e-12)?,
            ),
        };
        let b1j = a.measure * r1;
        let b0j = a.main * d_main + a.curvature * d_curv;
        out.b1 += norm * b1j;
        out.b0 += norm * b0j;
        out.sheets.push((a.index, b1j, b0j));
    }
    Ok(out)
}

/// `b_1(x, phi)` and `b_0(x, phi)` from the symbols.
pub fn b_coefficients(pair: &SymbolPair, x: &[f64], phi: f64, quad: &CosphereQuadrature, opts: &ResolventOptions) -> Result<BCoefficients> {
    check_angle(phi)?;
    let ang = angular_parts(pair, x, quad, &opts.jet)?;
    b_from_angular(&ang, pair.space_dim(), phi, opts.radial)
}

/// `a0+ = (phi1 b0(phi2) - phi2 b0(phi1)) / (2 pi (phi2 - phi1))`.
pub fn recover_two_angle(phi1: f64, b0_1: f64, phi2: f64, b0_2: f64) -> Result<f64> {
    check_angle(phi1)?;
    check_angle(phi2)?;
    if (phi1 - phi2).abs() < 1e-6 {
        return Err(Error::DegenerateAngles);
    }
    Ok((phi1 * b0_2 - phi2 * b0_1) / (2.0 * PI * (phi2 - phi1)))
}

/// `a0+ = -(1/2 pi) lim_{phi -> 0} b0(phi)`, with the limit taken by
/// least-squares extrapolation of `b0` along the sampled angles.
pub fn recover_limit(samples: &[(f64, f64)]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::InvalidArgument("need at least two angles".into()));
    }
    for (phi, _) in samples {
        check_angle(*phi)?;
    }
    let k = samples.len() as f64;
    let mx = samples.iter().map(|s| s.0).sum::<f64>() / k;
    let my = samples.iter().map(|s| s.1).sum::<f64>() / k;
    let sxx: f64 = samples.iter().map(|s| (s.0 - mx).powi(2)).sum();
    if sxx < 1e-12 {
        return Err(Error::DegenerateAngles);
    }
    let sxy: f64 = samples.iter().map(|s| (s.0 - mx) * (s.1 - my)).sum();
    let intercept = my - sxy / sxx * mx;
    Ok(-intercept / (2.0 * PI))
}

/// Angles used for the limit recovery.
pub const LIMIT_ANGLES: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

/// Second Weyl coefficient recovered from the resolvent route.
#[derive(Clone, Debug, PartialEq)]
pub struct Recovery {
    pub angles: (f64, f64),
    pub b: (BCoefficients, BCoefficients),
    pub two_angle: f64,
    pub limit: f64,
}

pub fn recover_second_weyl(
    pair: &SymbolPair,
    x: &[f64],
    angles: (f64, f64),
    quad: &CosphereQuadrature,
    opts: &ResolventOptions,
) -> Result<Recovery> {
    check_angle(angles.0)?;
    check_angle(angles.1)?;
    if (angles.0 - angles.1).abs() < 1e-6 {
        return Err(Error::DegenerateAngles);
    }
    let n = pair.space_dim();
    let ang = angular_parts(pair, x, quad, &opts.jet)?;
    let b_1 = b_from_angular(&ang, n, angles.0, opts.radial)?;
    let b_2 = b_from_angular(&ang, n, angles.1, opts.radial)?;
    let two_angle = recover_two_angle(angles.0, b_1.b0, angles.1, b_2.b0)?;
    let samples = LIMIT_ANGLES
        .iter()
        .map(|&phi| b_from_angular(&ang, n, phi, opts.radial).map(|b| (phi, b.b0)))
        .collect::<Result<Vec<_>>>()?;
    let limit = recover_limit(&samples)?;
    Ok(Recovery {
        angles,
        b: (b_1, b_2),
        two_angle,
        limit,
    })
}
