//! The auxiliary functions
//! `g_n(mu, z) = 2/(mu - z)^n - 1/(mu - 2z)^n - 2/(mu - zbar)^n + 1/(mu - 2 zbar)^n`
//! and their moments `int_0^inf g_n(mu, z) mu^p dmu` for `p = n` and `p = n - 1`.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, Integral};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn check_z(z: Complex64) -> Result<()> {
    if z.im == 0.0 || !z.im.is_finite() || !z.re.is_finite() {
        return Err(Error::RealSpectralParameter);
    }
    Ok(())
}

/// `g_n(mu, z)`; always purely imaginary.
pub fn g_n(mu: f64, z: Complex64, n: u32) -> Complex64 {
    let w = 2.0 * (Complex64::new(mu, 0.0) - z).powi(-(n as i32))
        - (Complex64::new(mu, 0.0) - 2.0 * z).powi(-(n as i32));
    Complex64::new(0.0, 2.0 * w.im)
}

/// Argument in `[0, 2 pi)`.
pub fn arg_2pi(z: Complex64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

/// Which moment of `g_n` is taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GnMoment {
    /// `int g_n mu^n`
    Equal,
    /// `int g_n mu^(n-1)`
    OneLess,
}

impl GnMoment {
    pub fn power(self, n: u32) -> u32 {
        match self {
            GnMoment::Equal => n,
            GnMoment::OneLess => n - 1,
        }
    }
}

/// Closed form of `int_0^inf g_n(mu, z) mu^p dmu`.
pub fn gn_integral_closed(n: u32, z: Complex64, moment: GnMoment) -> Result<Complex64> {
    check_z(z)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    Ok(match moment {
        GnMoment::Equal => I * (4.0 * n as f64 * LN_2 * z.im),
        GnMoment::OneLess => I * (PI * (1.0 + z.im.signum()) - arg_2pi(z * z)),
    })
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Exact tail `int_R^inf g_n mu^p dmu` from the convergent large-`mu` expansion.
fn tail(n: u32, p: u32, z: Complex64, r: f64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut zk = z * z;
    for k in 2..200u32 {
        let c = binomial(n + k - 1, k) * (2.0 - 2f64.powi(k as i32));
        let e = (n + k - p - 1) as i32;
        let weight = c * r.powi(-e) / e as f64;
        sum += (zk - zk.conj()) * weight;
        // Stop on the bound |z^k - conj(z^k)| <= 2|z|^k; single terms vanish at special angles.
        if 2.0 * zk.norm() * weight.abs() <= 1e-18 * sum.norm().max(1e-300) {
            break;
        }
        zk *= z;
    }
    sum
}

/// Numerical value of `int_0^inf g_n(mu, z) mu^p dmu` by adaptive quadrature on
/// `[0, 50|z|]` plus the exact series for the tail.
pub fn gn_integral_numeric(n: u32, z: Complex64, moment: GnMoment, rel_tol: f64) -> Result<Integral> {
    check_z(z)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let p = moment.power(n);
    let r = 50.0 * z.norm();
    let mut cuts = vec![0.0];
    for c in [z.re, 2.0 * z.re] {
        if c > 0.0 && c < r {
            cuts.push(c);
        }
    }
    cuts.push(r);
    cuts.sort_by(f64::total_cmp);
    let scale = z.norm().powi(p as i32 + 1 - n as i32);
    let mut total = Integral {
        value: tail(n, p, z, r),
        error: 0.0,
        evaluations: 0,
    };
    for w in cuts.windows(2) {
        let part = integrate_adaptive(
            |mu| g_n(mu, z, n) * mu.powi(p as i32),
            w[0],
            w[1],
            rel_tol * scale * 1e-2,
            rel_tol * 1e-2,
            4000,
        )?;
        total.value += part.value;
        total.error += part.error;
        total.evaluations += part.evaluations;
    }
    Ok(total)
}

/// The pair `(b_1, b_0)` predicted from the four local Weyl coefficients:
/// `b_1 = -4 ln2 (n-1) sin(phi) [a1+ + (-1)^n a1-]` and
/// `b_0 = -2 [(pi - phi) a0+ + (-1)^n phi a0-]`.
pub fn lemma2_b_coefficients(
    first_plus: f64,
    first_minus: f64,
    second_plus: f64,
    second_minus: f64,
    n: usize,
    phi: f64,
) -> Result<(f64, f64)> {
    if !(phi > 0.0 && phi < PI) {
        return Err(Error::AngleOutOfRange(phi));
    }
    let sgn = if n % 2 == 0 { 1.0 } else { -1.0 };
    let b1 = -4.0 * LN_2 * (n as f64 - 1.0) * phi.sin() * (first_plus + sgn * first_minus);
    let b0 = -2.0 * ((PI - phi) * second_plus + sgn * phi * second_minus);
    Ok((b1, b0))
}
