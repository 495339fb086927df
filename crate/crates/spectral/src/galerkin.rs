//! Fourier-Galerkin discretization on the mode box `[-K, K]^n`.
//!
//! In the plane-wave basis `exp(i k.x) e_a / (2 pi)^{n/2}` the operator has
//! matrix elements `<k'|L|k> = sum_a (1/2)(k_a + k'_a) A^a_{k'-k} + B_{k'-k}`.
//! Modes that are not connected through any coupling mode never interact, so
//! the matrix is split into independent dense blocks.

use std::f64::consts::PI;

use faer::{c64, Mat, Side};
use rayon::prelude::*;

use crate::error::{Result, SpectralError};
use crate::model::TorusModel;

/// Eigenvalues with `|lambda| <= TRUSTED_FRACTION * K` are considered resolved.
pub const TRUSTED_FRACTION: f64 = 0.6;
/// Default largest dense block dimension.
pub const DEFAULT_BLOCK_BUDGET: usize = 6000;

#[derive(Clone, Copy, Debug)]
pub struct GalerkinOptions {
    pub k_max: usize,
    pub block_budget: usize,
}

impl GalerkinOptions {
    pub fn new(k_max: usize) -> Self {
        GalerkinOptions {
            k_max,
            block_budget: DEFAULT_BLOCK_BUDGET,
        }
    }
}

/// Eigenpairs of one connected block.
#[derive(Clone, Debug)]
pub struct BlockSpectrum {
    pub modes: Vec<Vec<i32>>,
    pub values: Vec<f64>,
    /// Columns are eigenvectors; row `i * m + a` is component `a` of mode `i`.
    pub vectors: Mat<c64>,
}

#[derive(Clone, Debug)]
pub struct SpectrumResult {
    pub k_max: usize,
    pub n: usize,
    pub m: usize,
    pub blocks: Vec<BlockSpectrum>,
    /// `(block, column)` of every eigenpair in ascending eigenvalue order.
    pub order: Vec<(usize, usize)>,
}

impl SpectrumResult {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.order.iter().map(|&(b, c)| self.blocks[b].values[c]).collect()
    }

    pub fn trusted_limit(&self) -> f64 {
        TRUSTED_FRACTION * self.k_max as f64
    }

    pub fn is_trusted(&self, lambda: f64) -> bool {
        lambda.abs() <= self.trusted_limit()
    }

    /// Local weights `|psi_k(x)|^2` in ascending eigenvalue order.
    pub fn weights(&self, x: &[f64]) -> Vec<f64> {
        let norm = (2.0 * PI).powi(-(self.n as i32));
        let per_block: Vec<Vec<f64>> = self
            .blocks
            .iter()
            .map(|blk| {
                let phases: Vec<c64> = blk
                    .modes
                    .iter()
                    .map(|k| {
                        let t: f64 = k.iter().zip(x).map(|(a, b)| *a as f64 * b).sum();
                        c64::from_polar(1.0, t)
                    })
                    .collect();
                (0..blk.values.len())
                    .map(|col| {
                        let mut w = 0.0;
                        for a in 0..self.m {
                            let mut amp = c64::new(0.0, 0.0);
                            for (i, ph) in phases.iter().enumerate() {
                                amp += blk.vectors[(i * self.m + a, col)] * ph;
                            }
                            w += amp.norm_sqr();
                        }
                        w * norm
                    })
                    .collect()
            })
            .collect();
        self.order.iter().map(|&(b, c)| per_block[b][c]).collect()
    }
}

struct Boxed {
    k: i32,
    n: usize,
}

impl Boxed {
    fn side(&self) -> usize {
        (2 * self.k + 1) as usize
    }

    fn count(&self) -> usize {
        self.side().pow(self.n as u32)
    }

    fn mode(&self, mut idx: usize) -> Vec<i32> {
        let mut out = vec![0; self.n];
        for a in (0..self.n).rev() {
            out[a] = (idx % self.side()) as i32 - self.k;
            idx /= self.side();
        }
        out
    }

    fn index(&self, mode: &[i32]) -> Option<usize> {
        let mut idx = 0;
        for &v in mode {
            if v.abs() > self.k {
                return None;
            }
            idx = idx * self.side() + (v + self.k) as usize;
        }
        Some(idx)
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn components(model: &TorusModel, bx: &Boxed) -> Vec<Vec<usize>> {
    let total = bx.count();
    let mut parent: Vec<usize> = (0..total).collect();
    let couplings = model.coupling_modes();
    for i in 0..total {
        let k = bx.mode(i);
        for q in &couplings {
            let kq: Vec<i32> = k.iter().zip(q).map(|(a, b)| a + b).collect();
            if let Some(j) = bx.index(&kq) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = std::collections::BTreeMap::new();
    for i in 0..total {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

fn solve_block(model: &TorusModel, bx: &Boxed, members: &[usize]) -> Result<BlockSpectrum> {
    let m = model.matrix_dim();
    let modes: Vec<Vec<i32>> = members.iter().map(|&i| bx.mode(i)).collect();
    let local: std::collections::HashMap<usize, usize> = members.iter().enumerate().map(|(l, &g)| (g, l)).collect();
    let d = modes.len() * m;
    let mut h = Mat::<c64>::zeros(d, d);
    for (j, kj) in modes.iter().enumerate() {
        let mut add = |q: &[i32], c: &weylsys_core::CMat, scale: &dyn Fn(&[i32]) -> f64| {
            let ki: Vec<i32> = kj.iter().zip(q).map(|(a, b)| a + b).collect();
            if let Some(i) = bx.index(&ki).and_then(|g| local.get(&g).copied()) {
                let s = scale(&ki);
                for a in 0..m {
                    for b in 0..m {
                        h[(i * m + a, j * m + b)] += c[(a, b)] * s;
                    }
                }
            }
        };
        for (alpha, coeff) in model.coeffs.iter().enumerate() {
            for (q, c) in coeff.terms() {
                add(q, c, &|ki: &[i32]| 0.5 * (ki[alpha] + kj[alpha]) as f64);
            }
        }
        for (q, c) in model.sub.terms() {
            add(q, c, &|_: &[i32]| 1.0);
        }
    }
    let eig = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| SpectralError::SolveFailure(format!("{e:?}")))?;
    let s = eig.S().column_vector();
    let values: Vec<f64> = (0..d).map(|i| s[i].re).collect();
    let mut vectors = eig.U().to_owned();
    for col in 0..d {
        let mut piv = 0;
        for r in 0..d {
            if vectors[(r, col)].norm() > vectors[(piv, col)].norm() * (1.0 + 1e-12) {
                piv = r;
            }
        }
        let z = vectors[(piv, col)];
        let rot = z.conj() / z.norm();
        for r in 0..d {
            vectors[(r, col)] *= rot;
        }
    }
    Ok(BlockSpectrum { modes, values, vectors })
}

/// Assemble the Galerkin matrix on `[-K, K]^n` and diagonalize it blockwise.
pub fn assemble_and_solve(model: &TorusModel, opts: &GalerkinOptions) -> Result<SpectrumResult> {
    if opts.k_max == 0 {
        return Err(SpectralError::InvalidParameter("K must be positive".into()));
    }
    let bx = Boxed {
        k: opts.k_max as i32,
        n: model.space_dim(),
    };
    let comps = components(model, &bx);
    let m = model.matrix_dim();
    if let Some(big) = comps.iter().map(|c| c.len() * m).max() {
        if big > opts.block_budget {
            return Err(SpectralError::BudgetExceeded {
                dim: big,
                budget: opts.block_budget,
            });
        }
    }
    let blocks = comps
        .par_iter()
        .map(|c| solve_block(model, &bx, c))
        .collect::<Result<Vec<_>>>()?;
    let mut order: Vec<(usize, usize)> = blocks
        .iter()
        .enumerate()
        .flat_map(|(b, blk)| (0..blk.values.len()).map(move |c| (b, c)))
        .collect();
    order.sort_by(|&(b1, c1), &(b2, c2)| {
        blocks[b1].values[c1]
            .total_cmp(&blocks[b2].values[c2])
            .then((b1, c1).cmp(&(b2, c2)))
    });
    Ok(SpectrumResult {
        k_max: opts.k_max,
        n: model.space_dim(),
        m,
        blocks,
        order,
    })
}
