#![allow(dead_code)]

use num_complex::Complex64;
use weylsys_core::{CMat, MatrixJet, SymbolField, SymbolPair};

pub fn c(r: f64, i: f64) -> Complex64 {
    Complex64::new(r, i)
}

pub fn pauli() -> [CMat; 4] {
    [
        CMat::identity(2, 2),
        CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
        CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]),
        CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]),
    ]
}

/// `A = sum_a xi_a (sigma_a + eps sin(x1) R_a)` with `R = (2 I, sigma_3, 0)`
/// in dimension `n` (2 or 3) and `B = beta I + gamma sigma_3`.
pub fn twisted(n: usize, eps: f64, beta: f64, gamma: f64) -> SymbolPair {
    let s = pauli();
    let base: Vec<CMat> = (0..n).map(|a| s[a + 1].clone()).collect();
    let twist: Vec<CMat> = [s[0].clone() * c(2.0, 0.0), s[3].clone(), CMat::zeros(2, 2)]
        .into_iter()
        .take(n)
        .collect();
    let coeff = {
        let (base, twist) = (base.clone(), twist.clone());
        move |x0: f64| -> Vec<CMat> {
            (0..n).map(|a| &base[a] + &twist[a] * c(eps * x0.sin(), 0.0)).collect()
        }
    };
    let eval = {
        let coeff = coeff.clone();
        move |p: &weylsys_core::PhasePoint| {
            let ca = coeff(p.x[0]);
            (0..n).fold(CMat::zeros(2, 2), |acc, a| acc + &ca[a] * c(p.xi[a], 0.0))
        }
    };
    let jet = {
        let coeff = coeff.clone();
        let twist = twist.clone();
        move |p: &weylsys_core::PhasePoint| {
            let ca = coeff(p.x[0]);
            let value = (0..n).fold(CMat::zeros(2, 2), |acc, a| acc + &ca[a] * c(p.xi[a], 0.0));
            let mut dx = vec![CMat::zeros(2, 2); n];
            dx[0] = (0..n).fold(CMat::zeros(2, 2), |acc, a| {
                acc + &twist[a] * c(eps * p.x[0].cos() * p.xi[a], 0.0)
            });
            MatrixJet { value, dx, dxi: ca }
        }
    };
    let a = SymbolField::new(2, n, 1, eval).with_jet(jet);
    let sub = SymbolField::new(2, n, 0, move |_| {
        let s = pauli();
        &s[0] * c(beta, 0.0) + &s[3] * c(gamma, 0.0)
    });
    SymbolPair::new(a, sub).unwrap()
}

/// Same principal symbol without analytic derivatives.
pub fn twisted_fd(n: usize, eps: f64, beta: f64, gamma: f64) -> SymbolPair {
    let t = twisted(n, eps, beta, gamma);
    let f = t.principal.clone();
    let a = SymbolField::new(2, n, 1, move |p| f.eval(p).unwrap());
    SymbolPair::new(a, t.sub).unwrap()
}

/// Sample points used by the frozen oracle values.
pub const SAMPLE_X1: [f64; 8] = [0.1, 0.3, 0.5, 0.7, 0.9, 1.1, 1.3, 1.5];
pub const SAMPLE_X2: f64 = 0.3;

/// Independent high-precision values for the twisted model with `eps = 0.1`,
/// `B = 0` at `x = (x1, 0.3)`: `(a1+, a0+)`.
pub const TWISTED_01: [(f64, f64); 8] = [
    (0.15924223021438949, 0.0079183865302574061),
    (0.15992274380249982, 0.0076056741972989626),
    (0.16119019542070079, 0.0069917869101987342),
    (0.16286431207509912, 0.0060995671729631089),
    (0.16469495143252621, 0.0049627138420761157),
    (0.16639277486598843, 0.0036250714075417222),
    (0.16767453813973244, 0.0021394866306303442),
    (0.1683168321050251, 0.00056598815251182763),
];
