//! Poisson brackets of matrix-valued functions.

use crate::error::{Error, Result};
use crate::symbol::{CMat, MatrixJet};

fn check(a: &MatrixJet, b: &MatrixJet) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "jets over dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    if a.shape().1 != b.shape().0 {
        return Err(Error::DimensionMismatch(format!(
            "cannot multiply {:?} by {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(())
}

/// `{P, R} = P_x R_xi - P_xi R_x`, summed over coordinates.
pub fn poisson_bracket(p: &MatrixJet, r: &MatrixJet) -> Result<CMat> {
    check(p, r)?;
    let mut out = CMat::zeros(p.shape().0, r.shape().1);
    for a in 0..p.dim() {
        out += &p.dx[a] * &r.dxi[a] - &p.dxi[a] * &r.dx[a];
    }
    Ok(out)
}

/// `{F, G, H} = F_x G H_xi - F_xi G H_x`, summed over coordinates.
pub fn generalized_bracket(f: &MatrixJet, g: &CMat, h: &MatrixJet) -> Result<CMat> {
    if f.dim() != h.dim() || f.shape().1 != g.nrows() || g.ncols() != h.shape().0 {
        return Err(Error::DimensionMismatch(format!(
            "bracket of {:?}, {:?}, {:?}",
            f.shape(),
            g.shape(),
            h.shape()
        )));
    }
    let mut out = CMat::zeros(f.shape().0, h.shape().1);
    for a in 0..f.dim() {
        out += &f.dx[a] * g * &h.dxi[a] - &f.dxi[a] * g * &h.dx[a];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::max_abs;
    use num_complex::Complex64;

    fn rand_mat(seed: u64, r: usize, c: usize) -> CMat {
        let mut s = seed;
        CMat::from_fn(r, c, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = ((s >> 11) as f64) / (1u64 << 53) as f64 - 0.5;
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = ((s >> 11) as f64) / (1u64 << 53) as f64 - 0.5;
            Complex64::new(a, b)
        })
    }

    fn rand_jet(seed: u64, r: usize, c: usize) -> MatrixJet {
        MatrixJet {
            value: rand_mat(seed, r, c),
            dx: (0..2).map(|k| rand_mat(seed + 10 + k, r, c)).collect(),
            dxi: (0..2).map(|k| rand_mat(seed + 20 + k, r, c)).collect(),
        }
    }

    #[test]
    fn antisymmetric_for_commuting_scalars() {
        let a = rand_jet(1, 1, 1);
        let b = rand_jet(2, 1, 1);
        let s = poisson_bracket(&a, &b).unwrap() + poisson_bracket(&b, &a).unwrap();
        assert!(max_abs(&s) < 1e-14);
    }

    #[test]
    fn identity_middle_reduces_to_poisson() {
        let a = rand_jet(3, 2, 2);
        let b = rand_jet(4, 2, 2);
        let g = CMat::identity(2, 2);
        let d = generalized_bracket(&a, &g, &b).unwrap() - poisson_bracket(&a, &b).unwrap();
        assert!(max_abs(&d) < 1e-14);
    }

    #[test]
    fn vector_shapes() {
        let v = rand_jet(5, 2, 1);
        let g = rand_mat(6, 2, 2);
        let s = generalized_bracket(&v.adjoint(), &g, &v).unwrap();
        assert_eq!(s.shape(), (1, 1));
        assert!(generalized_bracket(&v, &g, &v).is_err());
    }
}
