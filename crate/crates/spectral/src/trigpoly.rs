//! Matrix-valued trigonometric polynomials on the torus `R^n / (2 pi Z)^n`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use weylsys_core::symbol::max_abs;
use weylsys_core::CMat;

/// `x -> sum_q C_q exp(i q . x)` with finitely many integer modes `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPolyMatrix {
    m: usize,
    n: usize,
    terms: BTreeMap<Vec<i32>, CMat>,
}

impl TrigPolyMatrix {
    pub fn zero(m: usize, n: usize) -> Self {
        TrigPolyMatrix { m, n, terms: BTreeMap::new() }
    }

    pub fn constant(c: CMat, n: usize) -> Self {
        let mut p = Self::zero(c.nrows(), n);
        p.add_term(vec![0; n], c);
        p
    }

    /// `R sin(x^axis)`.
    pub fn sine(r: &CMat, axis: usize, n: usize) -> Self {
        let mut p = Self::zero(r.nrows(), n);
        let mut q = vec![0; n];
        q[axis] = 1;
        let half = Complex64::new(0.0, -0.5);
        p.add_term(q.clone(), r * half);
        q[axis] = -1;
        p.add_term(q, r * (-half));
        p
    }

    pub fn add_term(&mut self, mode: Vec<i32>, c: CMat) {
        assert_eq!(mode.len(), self.n);
        assert_eq!(c.shape(), (self.m, self.m));
        let slot = self.terms.entry(mode).or_insert_with(|| CMat::zeros(self.m, self.m));
        *slot += c;
    }

    pub fn plus(mut self, other: &TrigPolyMatrix) -> Self {
        for (q, c) in &other.terms {
            self.add_term(q.clone(), c.clone());
        }
        self
    }

    pub fn matrix_dim(&self) -> usize {
        self.m
    }

    pub fn space_dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &CMat)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, mode: &[i32]) -> Option<&CMat> {
        self.terms.get(mode)
    }

    pub fn eval(&self, x: &[f64]) -> CMat {
        let mut out = CMat::zeros(self.m, self.m);
        for (q, c) in &self.terms {
            let ph: f64 = q.iter().zip(x).map(|(a, b)| *a as f64 * b).sum();
            out += c * Complex64::from_polar(1.0, ph);
        }
        out
    }

    /// Value and gradient in `x`.
    pub fn eval_grad(&self, x: &[f64]) -> (CMat, Vec<CMat>) {
        let mut v = CMat::zeros(self.m, self.m);
        let mut g = vec![CMat::zeros(self.m, self.m); self.n];
        for (q, c) in &self.terms {
            let ph: f64 = q.iter().zip(x).map(|(a, b)| *a as f64 * b).sum();
            let t = c * Complex64::from_polar(1.0, ph);
            for (a, ga) in g.iter_mut().enumerate() {
                if q[a] != 0 {
                    *ga += &t * Complex64::new(0.0, q[a] as f64);
                }
            }
            v += t;
        }
        (v, g)
    }

    /// Largest violation of `C_{-q} = C_q^*`, i.e. of pointwise Hermiticity.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (q, c) in &self.terms {
            let neg: Vec<i32> = q.iter().map(|a| -a).collect();
            let d = match self.terms.get(&neg) {
                Some(cn) => max_abs(&(cn - c.adjoint())),
                None => max_abs(c),
            };
            worst = worst.max(d);
        }
        worst
    }
}
