//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! fails if any criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weylsys_cli::run::gn_rows;
use weylsys_cli::{run, RunConfig};
use weylsys_core::eigen::{eigen_jet_with, Gauge, JetOptions};
use weylsys_core::resolvent::{
    radial_profile, resolvent_symbol, trace_resolvent_symbol, triple_trace_defect, SpectralParameter,
};
use weylsys_core::symbol::trace;
use weylsys_core::weyl::integrand_terms;
use weylsys_core::{eigen_jet, CMat, PhasePoint, SymbolField, SymbolPair};
use weylsys_spectral::{
    assemble_and_solve, build_model, mollifier_moments, spectral_fit, GalerkinOptions, Mollifier, SpectralFitOptions,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_point(rng: &mut ChaCha8Rng) -> PhasePoint {
    let x = vec![rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI)];
    let (r, t) = (rng.gen_range(0.3..3.0), rng.gen_range(0.0..2.0 * PI));
    PhasePoint::new(x, vec![r * t.cos(), r * t.sin()]).unwrap()
}

/// Twisted principal symbol with an x-dependent subprincipal symbol, so every
/// integrand scalar is nontrivial.
fn twisted_with_sub() -> SymbolPair {
    let model = build_model("twisted", &Default::default()).unwrap();
    let principal = model.symbol_pair().principal;
    let sub = SymbolField::new(2, 2, 0, |p: &PhasePoint| {
        let a = 0.2 + 0.1 * p.x[1].cos();
        let b = 0.15 * p.x[0].sin();
        CMat::from_row_slice(2, 2, &[
            Complex64::new(a + b, 0.0),
            Complex64::new(0.05, -0.02),
            Complex64::new(0.05, 0.02),
            Complex64::new(a - b, 0.0),
        ])
    });
    SymbolPair::new(principal, sub).unwrap()
}

fn closed_forms() -> Outcome {
    let angles: Vec<f64> = (1..=5).map(|k| k as f64 * PI / 6.0).collect();
    let rows = gn_rows(&[2, 3, 4, 5], &angles).map_err(|e| e.to_string())?;
    let worst = rows.iter().map(|r| r.rel_err()).fold(0.0, f64::max);
    check(rows.len() == 40 && worst < 1e-6, format!("{} integrals, max rel err {worst:.2e}", rows.len()))
}

fn radial_profile_check() -> Outcome {
    let (mut err, mut spread) = (0.0f64, 0.0f64);
    for k in 1..=5 {
        let phi = k as f64 * PI / 6.0;
        let want = -2.0 * (PI - phi);
        for part in [1u8, 2] {
            let v2 = radial_profile(phi, 2, part).map_err(|e| e.to_string())?;
            let v5 = radial_profile(phi, 5, part).map_err(|e| e.to_string())?;
            err = err.max((v2 - want).abs()).max((v5 - want).abs());
            spread = spread.max((v2 - v5).abs());
        }
    }
    check(err < 1e-6 && spread < 1e-8, format!("max |profile + 2(pi - phi)| {err:.2e}, n=2 vs n=5 {spread:.2e}"))
}

fn trace_identities() -> Outcome {
    let pair = twisted_with_sub();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let (mut d44, mut df1, mut d45) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let p = random_point(&mut rng);
        let z = SpectralParameter::polar(rng.gen_range(0.5..3.0), rng.gen_range(0.1..3.0)).map_err(|e| e.to_string())?;
        let jet = eigen_jet(&pair.principal, &p, 1e-3, None).map_err(|e| e.to_string())?;
        d44 = d44.max(triple_trace_defect(&jet).map_err(|e| e.to_string())?);
        df1 = df1.max(jet.projection_identity_defect());
        let full = trace(&resolvent_symbol(&pair, &p, z, 1e-3).map_err(|e| e.to_string())?);
        let sub = pair.sub.eval(&p).map_err(|e| e.to_string())?;
        let sheets = trace_resolvent_symbol(&jet, &sub, z).map_err(|e| e.to_string())?;
        d45 = d45.max((full - sheets).norm() / full.norm().max(1.0));
    }
    check(
        d44 < 1e-6 && df1 < 1e-6 && d45 < 1e-6,
        format!("100 points: triple-trace {d44:.2e}, projection identity {df1:.2e}, trace formula {d45:.2e}"),
    )
}

fn gauge_invariance() -> Outcome {
    let pair = twisted_with_sub();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let p = random_point(&mut rng);
        let sub = pair.sub.eval(&p).map_err(|e| e.to_string())?;
        let base = eigen_jet_with(&pair.principal, &p, &JetOptions::default()).map_err(|e| e.to_string())?;
        let base_terms: Vec<_> = base
            .sheets
            .iter()
            .map(|s| integrand_terms(&base, s, &sub))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        for _ in 0..20 {
            let c: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
            let phase = Arc::new(move |q: &PhasePoint| {
                let w = q.xi_norm();
                c[0] * q.x[0].sin() + c[1] * q.x[1].cos() + c[2] * q.xi[0] / w
                    + c[3] * (q.x[0] + q.x[1]).cos() * q.xi[1] / w
                    + c[4] * w.ln()
                    + c[5]
            });
            let opts = JetOptions {
                gauge: Gauge::Phase(phase),
                ..JetOptions::default()
            };
            let gauged = eigen_jet_with(&pair.principal, &p, &opts).map_err(|e| e.to_string())?;
            for (s, t0) in gauged.sheets.iter().zip(&base_terms) {
                let t = integrand_terms(&gauged, s, &sub).map_err(|e| e.to_string())?;
                worst = worst
                    .max((t.sub - t0.sub).norm())
                    .max((t.bracket - t0.bracket).norm())
                    .max((t.curvature - t0.curvature).norm());
            }
        }
    }
    check(worst < 1e-6, format!("50 points x 20 gauges, max deviation {worst:.2e}"))
}

fn pipeline_agreement() -> Outcome {
    let cfg = RunConfig::parse("model = twisted\nmodel.eps = 0.1\npipeline = resolvent").unwrap();
    let r = run(&cfg).map_err(|e| e.to_string())?;
    let (mut two, mut lim, mut b1) = (0.0f64, 0.0f64, 0.0f64);
    for (rec, w) in r.recovery.iter().zip(&r.direct) {
        two = two.max((rec.two_angle - w.second_plus).abs() / w.second_plus.abs());
        lim = lim.max((rec.limit - w.second_plus).abs() / w.second_plus.abs());
        for b in [&rec.b.0, &rec.b.1] {
            let (want, _) = weylsys_core::gn::lemma2_b_coefficients(
                w.first_plus,
                w.first_minus,
                w.second_plus,
                w.second_minus,
                2,
                b.phi,
            )
            .map_err(|e| e.to_string())?;
            b1 = b1.max((b.b1 - want).abs());
        }
    }
    check(
        r.recovery.len() == 8 && two < 1e-4 && lim < 1e-4 && b1 < 1e-6,
        format!("8 points: two-angle rel {two:.2e}, limit rel {lim:.2e}, b1 abs {b1:.2e}"),
    )
}

fn constant_coefficients() -> Outcome {
    let sd = build_model("shifted-dirac", &[("beta".to_string(), 0.3)].into()).map_err(|e| e.to_string())?;
    let spec = assemble_and_solve(&sd, &GalerkinOptions::new(32)).map_err(|e| e.to_string())?;
    let xs: Vec<Vec<f64>> = (0..8).map(|i| vec![0.1 + 0.2 * i as f64, 0.3]).collect();
    let rows = spectral_fit(&spec, &xs, &SpectralFitOptions::default()).map_err(|e| e.to_string())?;
    let (a1, a0) = (1.0 / (2.0 * PI), -0.3 / (2.0 * PI));
    let e1 = rows.iter().map(|r| (r.fit.first / a1 - 1.0).abs()).fold(0.0, f64::max);
    let e0 = rows.iter().map(|r| (r.fit.second / a0 - 1.0).abs()).fold(0.0, f64::max);

    let md = build_model("mass-dirac", &[("b".to_string(), 0.5)].into()).map_err(|e| e.to_string())?;
    let spec = assemble_and_solve(&md, &GalerkinOptions::new(32)).map_err(|e| e.to_string())?;
    let got: Vec<f64> = spec.eigenvalues().into_iter().filter(|l| spec.is_trusted(*l)).collect();
    let mut want = Vec::new();
    for k1 in -32i32..=32 {
        for k2 in -32i32..=32 {
            let e = ((k1 * k1 + k2 * k2) as f64 + 0.25).sqrt();
            want.extend([e, -e]);
        }
    }
    want.retain(|l| spec.is_trusted(*l));
    want.sort_by(f64::total_cmp);
    let dev = if got.len() == want.len() {
        got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    check(
        e1 < 0.02 && e0 < 0.10 && dev < 1e-10,
        format!(
            "shifted-dirac K=32: a1 rel {e1:.2e}, a0 rel {e0:.2e}; mass-dirac {} trusted eigenvalues, max dev {dev:.2e}",
            got.len()
        ),
    )
}

fn x_dependent() -> Outcome {
    let cfg = RunConfig::parse("model = twisted\nmodel.eps = 0.1\npipeline = spectral\nspectral.k = 16, 24, 32").unwrap();
    let r = run(&cfg).map_err(|e| e.to_string())?;
    let a0 = r.direct.iter().map(|w| w.second_plus).sum::<f64>() / r.direct.len() as f64;
    let errs: Vec<f64> = [16usize, 24, 32]
        .iter()
        .map(|k| {
            let fits: Vec<f64> = r.spectral.iter().filter(|s| s.k_max == *k).map(|s| s.fit.second).collect();
            (fits.iter().sum::<f64>() / fits.len() as f64 - a0).abs() / a0.abs()
        })
        .collect();
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    check(
        errs[2] < 0.15 && monotone,
        format!("averaged a0 rel err K=16,24,32: {:.3}, {:.3}, {:.4}", errs[0], errs[1], errs[2]),
    )
}

fn mollifier_contract() -> Outcome {
    let mut mass = 0.0f64;
    let mut moment = 0.0f64;
    for t in [1.0, 2.0, 4.0] {
        let m = mollifier_moments(t, 6).map_err(|e| e.to_string())?;
        mass = mass.max((m.moments[0] - 1.0).abs());
        moment = moment.max(m.moments[1..].iter().map(|v| v.abs()).fold(0.0, f64::max));
        let mo = Mollifier::new(t).map_err(|e| e.to_string())?;
        mass = mass.max((mo.mass_from_samples(0.05) - 1.0).abs());
    }
    // Mollifier independence of the fitted coefficients.
    let sd = build_model("shifted-dirac", &Default::default()).map_err(|e| e.to_string())?;
    let spec = assemble_and_solve(&sd, &GalerkinOptions::new(128)).map_err(|e| e.to_string())?;
    let x = vec![vec![0.5, 0.3]];
    let fit = |t: f64| {
        spectral_fit(&spec, &x, &SpectralFitOptions { t_rho: t, ..Default::default() }).map(|r| r[0].fit.clone())
    };
    let (f1, f2) = (fit(1.0).map_err(|e| e.to_string())?, fit(2.0).map_err(|e| e.to_string())?);
    let resid = f1.residual.hypot(f2.residual);
    let (d1, d0) = ((f1.first - f2.first).abs(), (f1.second - f2.second).abs());
    check(
        mass < 1e-8 && moment < 1e-6 && d1 < resid && d0 < resid,
        format!(
            "mass err {mass:.1e}, max |moment 1..6| {moment:.1e}; T=1 vs T=2 at K=128: |da1| {d1:.1e}, |da0| {d0:.1e} < residual {resid:.1e}"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 8] = [
        ("closed-form radial integrals", Duration::from_secs(10), closed_forms),
        ("radial profile", Duration::from_secs(10), radial_profile_check),
        ("trace identities", Duration::from_secs(30), trace_identities),
        ("gauge invariance", Duration::from_secs(120), gauge_invariance),
        ("direct vs resolvent recovery", Duration::from_secs(120), pipeline_agreement),
        ("constant-coefficient spectra", Duration::from_secs(300), constant_coefficients),
        ("x-dependent spectra", Duration::from_secs(900), x_dependent),
        ("mollifier contract", Duration::from_secs(30), mollifier_contract),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let (tag, detail) = match outcome {
            Ok(d) if elapsed <= *limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; runtime over {limit:?}")),
            Err(d) => ("FAIL", d),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("criterion {} [{tag}] {name}: {detail} ({:.2}s)", i + 1, elapsed.as_secs_f64());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
