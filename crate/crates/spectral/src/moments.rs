//! Extended-precision moments of the mollifier.
//!
//! `M_m(V) = int_{-V}^{V} nu^m rho(nu) dnu` is evaluated in the Fourier domain,
//! `M_m(V) = (1/2pi) int rho_hat(t) K_m(t) dt`, `K_m(t) = int_{-V}^{V} nu^m e^{i nu t} dnu`,
//! with a trapezoid rule over the support of `rho_hat`. The trapezoid is
//! spectrally accurate because the integrand is smooth and compactly supported;
//! the cancellations inside `K_m` need far more than double precision.

use astro_float::{BigFloat, Consts, RoundingMode};

use crate::error::{Result, SpectralError};
use crate::mollifier::rho_hat_unit;

const PRECISION: usize = 320;
const RM: RoundingMode = RoundingMode::ToEven;
const NODES_PER_SIDE: usize = 4096;
/// Product `V * T` of truncation and support widths.
const WINDOW_PRODUCT: f64 = 5000.0;
/// Below this `|V t|` the kernels are summed as power series.
const SERIES_LIMIT: f64 = 20.0;

#[derive(Clone, Debug)]
pub struct MomentReport {
    pub t_rho: f64,
    /// Truncation `V` of the moment integrals.
    pub window: f64,
    /// `M_0, ..., M_max`.
    pub moments: Vec<f64>,
}

fn bf(x: f64) -> BigFloat {
    BigFloat::from_f64(x, PRECISION)
}

fn to_f64(x: &BigFloat) -> f64 {
    x.to_string().parse().unwrap_or(f64::NAN)
}

/// `rho_hat` for support width `t_rho` at `t`, in extended precision.
fn rho_hat_big(t: &BigFloat, t_rho: f64, cc: &mut Consts) -> BigFloat {
    let a = to_f64(&t.abs()) / t_rho;
    if a <= 0.5 {
        return bf(1.0);
    }
    if a >= 1.0 {
        return bf(0.0);
    }
    // u = 2|t|/T - 1 in (0, 1).
    let u = t.abs().div(&bf(t_rho), PRECISION, RM).mul(&bf(2.0), PRECISION, RM).sub(&bf(1.0), PRECISION, RM);
    let f = |s: &BigFloat, cc: &mut Consts| s.reciprocal(PRECISION, RM).neg().exp(PRECISION, RM, cc);
    let one_minus = bf(1.0).sub(&u, PRECISION, RM);
    let p = f(&one_minus, cc);
    let q = f(&u, cc);
    p.div(&p.add(&q, PRECISION, RM), PRECISION, RM)
}

/// `C_k(t) = int_0^V nu^k cos(nu t)` and `S_k(t) = int_0^V nu^k sin(nu t)`, `k <= max`.
fn kernels(t: &BigFloat, v: &BigFloat, max: usize, cc: &mut Consts) -> (Vec<BigFloat>, Vec<BigFloat>) {
    let vt = v.mul(t, PRECISION, RM);
    if to_f64(&vt).abs() <= SERIES_LIMIT {
        return kernels_series(t, v, max);
    }
    let (s, c) = (vt.sin(PRECISION, RM, cc), vt.cos(PRECISION, RM, cc));
    let inv_t = t.reciprocal(PRECISION, RM);
    let mut cs = Vec::with_capacity(max + 1);
    let mut ss = Vec::with_capacity(max + 1);
    cs.push(s.mul(&inv_t, PRECISION, RM));
    ss.push(bf(1.0).sub(&c, PRECISION, RM).mul(&inv_t, PRECISION, RM));
    let mut vk = bf(1.0);
    for k in 1..=max {
        vk = vk.mul(v, PRECISION, RM);
        let kt = bf(k as f64).mul(&inv_t, PRECISION, RM);
        let ck = vk.mul(&s, PRECISION, RM).mul(&inv_t, PRECISION, RM).sub(&kt.mul(&ss[k - 1], PRECISION, RM), PRECISION, RM);
        let sk = kt.mul(&cs[k - 1], PRECISION, RM).sub(&vk.mul(&c, PRECISION, RM).mul(&inv_t, PRECISION, RM), PRECISION, RM);
        cs.push(ck);
        ss.push(sk);
    }
    (cs, ss)
}

fn kernels_series(t: &BigFloat, v: &BigFloat, max: usize) -> (Vec<BigFloat>, Vec<BigFloat>) {
    let vt = v.mul(t, PRECISION, RM);
    let eps = bf(2f64.powi(-(PRECISION as i32) + 8));
    let mut cs = Vec::with_capacity(max + 1);
    let mut ss = Vec::with_capacity(max + 1);
    for m in 0..=max {
        // V^{m+1} sum_j (-1)^j (Vt)^j / j! / (m + j + 1), split by parity of j.
        let vm1 = v.powi(m + 1, PRECISION, RM);
        let mut c = bf(0.0);
        let mut s = bf(0.0);
        let mut term = bf(1.0);
        let mut j = 0usize;
        loop {
            let piece = term.div(&bf((m + j + 1) as f64), PRECISION, RM);
            match j % 4 {
                0 => c = c.add(&piece, PRECISION, RM),
                1 => s = s.add(&piece, PRECISION, RM),
                2 => c = c.sub(&piece, PRECISION, RM),
                _ => s = s.sub(&piece, PRECISION, RM),
            }
            j += 1;
            term = term.mul(&vt, PRECISION, RM).div(&bf(j as f64), PRECISION, RM);
            if j > 8 && term.abs().cmp(&eps).map_or(false, |o| o < 0) {
                break;
            }
        }
        cs.push(c.mul(&vm1, PRECISION, RM));
        ss.push(s.mul(&vm1, PRECISION, RM));
    }
    (cs, ss)
}

/// Moments `M_0..M_max` of `rho` for support width `t_rho`, truncated at `V = 5000 / t_rho`.
pub fn mollifier_moments(t_rho: f64, max: usize) -> Result<MomentReport> {
    if !(t_rho > 0.0 && t_rho.is_finite()) {
        return Err(SpectralError::InvalidParameter(format!("T_rho = {t_rho}")));
    }
    let mut cc = Consts::new().map_err(|e| SpectralError::SolveFailure(format!("{e:?}")))?;
    let window = WINDOW_PRODUCT / t_rho;
    let v = bf(window);
    let h = bf(t_rho).div(&bf(NODES_PER_SIDE as f64), PRECISION, RM);
    let mut even = vec![bf(0.0); max + 1];
    let mut odd = vec![bf(0.0); max + 1];
    for l in 0..NODES_PER_SIDE {
        let t = h.mul(&bf(l as f64), PRECISION, RM);
        let w = if l == 0 {
            bf(1.0)
        } else {
            if rho_hat_unit(l as f64 / NODES_PER_SIDE as f64) == 0.0 {
                continue;
            }
            rho_hat_big(&t, t_rho, &mut cc)
        };
        if l == 0 {
            // K_m(0) = 2 V^{m+1}/(m+1) for even m, 0 for odd m.
            for (m, acc) in even.iter_mut().enumerate() {
                if m % 2 == 0 {
                    let k0 = v.powi(m + 1, PRECISION, RM).mul(&bf(2.0), PRECISION, RM).div(&bf((m + 1) as f64), PRECISION, RM);
                    *acc = acc.add(&k0, PRECISION, RM);
                }
            }
            continue;
        }
        let (cp, sp) = kernels(&t, &v, max, &mut cc);
        let (_, sn) = kernels(&t.neg(), &v, max, &mut cc);
        for m in 0..=max {
            if m % 2 == 0 {
                // rho_hat and C_m are even: nodes at +t and -t contribute equally.
                let k = cp[m].mul(&bf(4.0), PRECISION, RM).mul(&w, PRECISION, RM);
                even[m] = even[m].add(&k, PRECISION, RM);
            } else {
                let k = sp[m].add(&sn[m], PRECISION, RM).mul(&bf(2.0), PRECISION, RM).mul(&w, PRECISION, RM);
                odd[m] = odd[m].add(&k, PRECISION, RM);
            }
        }
    }
    let two_pi = cc.pi(PRECISION, RM).mul(&bf(2.0), PRECISION, RM);
    let scale = h.div(&two_pi, PRECISION, RM);
    let moments = (0..=max)
        .map(|m| {
            let acc = if m % 2 == 0 { &even[m] } else { &odd[m] };
            to_f64(&acc.mul(&scale, PRECISION, RM))
        })
        .collect();
    Ok(MomentReport { t_rho, window, moments })
}
