mod common;

use std::f64::consts::PI;

use common::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weylsys_core::gn::lemma2_b_coefficients;
use weylsys_core::quadrature::integrate_adaptive;
use weylsys_core::resolvent::*;
use weylsys_core::symbol::trace;
use weylsys_core::weyl::{second_weyl, WeylOptions};
use weylsys_core::{eigen_jet, CosphereQuadrature, PhasePoint, SymbolPair};

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> PhasePoint {
    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
    let r = rng.gen_range(0.3..3.0);
    let xi: Vec<f64> = loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if nv > 0.2 {
            break v.iter().map(|a| a * r / nv).collect();
        }
    };
    PhasePoint::new(x, xi).unwrap()
}

#[test]
fn trace_of_resolvent_symbol_matches_sheet_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pair = twisted(2, 0.1, 0.2, -0.1);
    for _ in 0..100 {
        let p = random_point(&mut rng, 2);
        let z = SpectralParameter::polar(rng.gen_range(0.5..3.0), rng.gen_range(0.1..3.0)).unwrap();
        let full = trace(&resolvent_symbol(&pair, &p, z, 1e-3).unwrap());
        let jet = eigen_jet(&pair.principal, &p, 1e-3, None).unwrap();
        let sub = pair.sub.eval(&p).unwrap();
        let sheets = trace_resolvent_symbol(&jet, &sub, z).unwrap();
        assert!((full - sheets).norm() < 1e-8 * full.norm().max(1.0), "{full} vs {sheets}");
        assert!(triple_trace_defect(&jet).unwrap() < 1e-8);
        assert!(jet.projection_identity_defect() < 1e-8);
    }
}

#[test]
fn resolvent_symbol_conjugation_and_leading_term() {
    let pair = twisted(2, 0.1, 0.2, 0.0);
    let zero = SymbolPair::new(pair.principal.clone(), twisted(2, 0.0, 0.0, 0.0).sub).unwrap();
    let p = PhasePoint::new(vec![0.4, 1.0], vec![0.7, -1.1]).unwrap();
    let z = SpectralParameter::polar(1.5, 0.8).unwrap();
    let zc = SpectralParameter::new(z.value().conj()).unwrap();
    let s = resolvent_symbol(&pair, &p, z, 1e-3).unwrap();
    let sc = resolvent_symbol(&pair, &p, zc, 1e-3).unwrap();
    assert!(weylsys_core::symbol::max_abs(&(s.adjoint() - sc)) < 1e-12);
    // The leading term is sum_j P_j / (h_j - z); with B = 0 only the bracket remains.
    let jet = eigen_jet(&pair.principal, &p, 1e-3, None).unwrap();
    let lead = jet.sheets.iter().fold(weylsys_core::CMat::zeros(2, 2), |acc, sh| {
        acc + &sh.p.value / (Complex64::new(sh.h, 0.0) - z.value())
    });
    let a = pair.principal.eval(&p).unwrap();
    let r = (a - weylsys_core::CMat::identity(2, 2) * z.value()).try_inverse().unwrap();
    assert!(weylsys_core::symbol::max_abs(&(&lead - &r)) < 1e-12);
    let s0 = resolvent_symbol(&zero, &p, z, 1e-3).unwrap();
    assert!(weylsys_core::symbol::max_abs(&(&s0 - &r)) > 1e-4);
}

#[test]
fn power_trace_matches_contour_derivative() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [2usize, 3] {
        let pair = twisted(n, 0.1, 0.3, 0.1);
        for _ in 0..20 {
            let p = random_point(&mut rng, n);
            let z = SpectralParameter::polar(rng.gen_range(0.5..2.0), rng.gen_range(0.2..2.9)).unwrap();
            let jet = eigen_jet(&pair.principal, &p, 1e-3, None).unwrap();
            let sub = pair.sub.eval(&p).unwrap();
            let explicit = power_trace_symbol(&jet, &sub, z, n).unwrap();
            let contour = power_trace_cauchy(&jet, &sub, z, n, 64).unwrap();
            assert!((explicit - contour).norm() < 1e-10 * explicit.norm().max(1.0), "n={n}: {explicit} {contour}");
        }
    }
}

#[test]
fn recovery_agrees_with_direct_route() {
    let q = CosphereQuadrature::new(2, 256).unwrap();
    let pair = twisted(2, 0.1, 0.0, 0.0);
    for (x1, (_, a0)) in SAMPLE_X1.iter().zip(TWISTED_01) {
        let x = [*x1, SAMPLE_X2];
        let r = recover_second_weyl(&pair, &x, (PI / 4.0, 3.0 * PI / 4.0), &q, &ResolventOptions::default()).unwrap();
        assert!((r.two_angle - a0).abs() < 1e-7 * a0.abs(), "{x1}: {} vs {a0}", r.two_angle);
        assert!((r.limit - a0).abs() < 1e-7 * a0.abs());
    }
}

#[test]
fn b_coefficients_follow_from_weyl_coefficients() {
    for n in [2usize, 3] {
        let q = CosphereQuadrature::new(n, if n == 2 { 128 } else { 24 }).unwrap();
        let pair = twisted(n, 0.1, 0.2, -0.15);
        let x: Vec<f64> = (0..n).map(|k| 0.4 + 0.3 * k as f64).collect();
        let w = second_weyl(&pair, &x, &q, &WeylOptions::default()).unwrap();
        for phi in [0.3, 1.2, 2.6] {
            let b = b_coefficients(&pair, &x, phi, &q, &ResolventOptions::default()).unwrap();
            let (b1, b0) = lemma2_b_coefficients(w.first_plus, w.first_minus, w.second_plus, w.second_minus, n, phi).unwrap();
            assert!((b.b1 - b1).abs() < 1e-10 * w.first_plus, "n={n}: {} {b1}", b.b1);
            assert!((b.b0 - b0).abs() < 1e-9 * b0.abs().max(1e-3), "n={n} phi={phi}: {} {b0}", b.b0);
            let numeric = b_coefficients(&pair, &x, phi, &q, &ResolventOptions { radial: RadialMethod::Numeric, ..Default::default() }).unwrap();
            assert!((numeric.b0 - b.b0).abs() < 1e-9 * b0.abs().max(1e-3));
            assert!((numeric.b1 - b.b1).abs() < 1e-9 * w.first_plus);
        }
    }
}

/// Integrates the subleading symbol over all of `xi` without using homogeneity.
fn b0_by_plane_quadrature(pair: &SymbolPair, x: &[f64], phi: f64, angles: usize) -> Vec<(i32, f64)> {
    let zs = [
        (2.0, Complex64::from_polar(1.0, phi)),
        (-1.0, Complex64::from_polar(2.0, phi)),
        (-2.0, Complex64::from_polar(1.0, -phi)),
        (1.0, Complex64::from_polar(2.0, -phi)),
    ];
    let mut out = vec![(-1, 0.0), (1, 0.0)];
    for k in 0..angles {
        let t = 2.0 * PI * k as f64 / angles as f64;
        for (slot, sheet) in [(0usize, -1i32), (1, 1)] {
            let radial = integrate_adaptive(
                |u| {
                    let r = u / (1.0 - u);
                    let p = PhasePoint::new(x.to_vec(), vec![r * t.cos(), r * t.sin()]).unwrap();
                    let jet = eigen_jet(&pair.principal, &p, 1e-3, None).unwrap();
                    let sub = pair.sub.eval(&p).unwrap();
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (wgt, z) in zs {
                        let terms = resolvent_terms(&jet, &sub, SpectralParameter::new(z).unwrap(), 2).unwrap();
                        let s = terms.iter().find(|s| s.index == sheet).unwrap();
                        acc += s.second() * wgt;
                    }
                    acc * Complex64::new(0.0, 1.0) * r / ((1.0 - u) * (1.0 - u))
                },
                1e-9,
                1.0 - 1e-9,
                1e-10,
                1e-9,
                4000,
            )
            .unwrap();
            out[slot].1 += radial.value.re * 2.0 * PI / angles as f64;
        }
    }
    out
}

#[test]
fn factorized_b0_matches_plane_quadrature() {
    let pair = twisted(2, 0.1, 0.25, 0.1);
    let x = [0.6, 0.3];
    let phi = 1.1;
    let q = CosphereQuadrature::new(2, 32).unwrap();
    let b = b_coefficients(&pair, &x, phi, &q, &ResolventOptions::default()).unwrap();
    let plane = b0_by_plane_quadrature(&pair, &x, phi, 32);
    for ((j, v), (k, w, _)) in plane.iter().zip(b.sheets.iter().map(|s| (s.0, s.2, s.1))) {
        assert_eq!(*j, k);
        assert!((v - w).abs() < 1e-6 * w.abs(), "sheet {j}: {v} vs {w}");
    }
}
