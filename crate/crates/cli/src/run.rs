//! Pipeline dispatch, cross-checks and the summary page.

use std::fmt::Write as _;
use std::path::PathBuf;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;
use weylsys_core::gn::{gn_integral_closed, gn_integral_numeric, lemma2_b_coefficients, GnMoment};
use weylsys_core::resolvent::{recover_second_weyl, Recovery, ResolventOptions};
use weylsys_core::{second_weyl, CosphereQuadrature, JetOptions, SymbolPair, WeylCoefficients, WeylOptions};
use weylsys_spectral::{
    assemble_and_solve, build_model, spectral_fit, GalerkinOptions, SpectralError, SpectralFitOptions, SpectralFitRow,
};

use crate::config::{ConfigError, Pipeline, RunConfig};
use crate::output::{num, Table, TOOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Compute,
    Verify,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl From<weylsys_core::Error> for RunError {
    fn from(e: weylsys_core::Error) -> Self {
        RunError::Numerical(e.to_string())
    }
}

impl From<SpectralError> for RunError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::UnknownModel(_) | SpectralError::InvalidParameter(_) => {
                RunError::Config(ConfigError::InvalidValue {
                    key: "model".into(),
                    message: e.to_string(),
                })
            }
            other => RunError::Numerical(other.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance,
            passed: value.is_finite() && value <= tolerance,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    pub direct: Vec<WeylCoefficients>,
    pub recovery: Vec<Recovery>,
    pub spectral: Vec<SpectralFitRow>,
    pub summary: String,
}

impl RunReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn write(&self, cfg: &RunConfig) -> std::io::Result<Vec<PathBuf>> {
        let hash = cfg.hash();
        self.tables.iter().map(|t| t.write(&cfg.out_dir, &hash)).collect()
    }
}

/// Denominator for relative comparisons of `a_0`, floored for models where it vanishes.
fn scale(a0: f64, a1: f64) -> f64 {
    a0.abs().max(1e-2 * a1.abs())
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, c) = v.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    s / c as f64
}

fn direct_table(rows: &[WeylCoefficients]) -> Table {
    let mut t = Table::new(
        "weyl_coefficients.csv",
        &["x1", "x2", "sheet", "a1_plus", "a0_plus", "term_sub", "term_bracket", "term_curv"],
    );
    for w in rows {
        let sums = |sign: i32| {
            w.sheets.iter().filter(|s| s.index.signum() == sign).fold([0.0; 3], |a, s| {
                [a[0] + s.term_sub, a[1] + s.term_bracket, a[2] + s.term_curv]
            })
        };
        let (p, m) = (sums(1), sums(-1));
        let mut push = |label: String, a1: f64, a0: f64, terms: [f64; 3]| {
            t.push(vec![
                num(w.x[0]),
                num(w.x[1]),
                label,
                num(a1),
                num(a0),
                num(terms[0]),
                num(terms[1]),
                num(terms[2]),
            ])
        };
        push("plus".into(), w.first_plus, w.second_plus, p);
        push("minus".into(), w.first_minus, w.second_minus, m);
        for s in &w.sheets {
            push(s.index.to_string(), s.first, s.second(), [s.term_sub, s.term_bracket, s.term_curv]);
        }
    }
    t
}

fn resolvent_table(points: &[Vec<f64>], rows: &[Recovery]) -> Table {
    let mut t = Table::new(
        "resolvent_recovery.csv",
        &["x1", "x2", "phi", "b1", "b0", "a0_recovered_two_angle", "a0_recovered_limit"],
    );
    for (x, r) in points.iter().zip(rows) {
        for b in [&r.b.0, &r.b.1] {
            t.push(vec![
                num(x[0]),
                num(x[1]),
                num(b.phi),
                num(b.b1),
                num(b.b0),
                num(r.two_angle),
                num(r.limit),
            ]);
        }
    }
    t
}

fn spectral_table(rows: &[SpectralFitRow]) -> Table {
    let mut t = Table::new("spectral_fit.csv", &["x1", "x2", "K", "a1_fit", "a0_fit", "residual"]);
    for r in rows {
        t.push(vec![
            num(r.x[0]),
            num(r.x[1]),
            r.k_max.to_string(),
            num(r.fit.first),
            num(r.fit.second),
            num(r.fit.residual),
        ]);
    }
    t
}

/// One row of the radial-integral comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct GnRow {
    pub n: u32,
    pub phi: f64,
    pub moment: GnMoment,
    pub closed: f64,
    pub numeric: f64,
}

impl GnRow {
    pub fn abs_err(&self) -> f64 {
        (self.closed - self.numeric).abs()
    }

    pub fn rel_err(&self) -> f64 {
        self.abs_err() / self.closed.abs().max(1e-300)
    }
}

/// Closed-form and numeric `int_0^inf g_n(mu, e^{i phi}) mu^p dmu` (imaginary parts).
pub fn gn_rows(dims: &[u32], angles: &[f64]) -> Result<Vec<GnRow>, RunError> {
    let mut jobs = Vec::new();
    for &n in dims {
        for &phi in angles {
            for moment in [GnMoment::Equal, GnMoment::OneLess] {
                jobs.push((n, phi, moment));
            }
        }
    }
    jobs.par_iter()
        .map(|&(n, phi, moment)| {
            let z = Complex64::from_polar(1.0, phi);
            let closed = gn_integral_closed(n, z, moment)?;
            let numeric = gn_integral_numeric(n, z, moment, 1e-12)?;
            Ok(GnRow {
                n,
                phi,
                moment,
                closed: closed.im,
                numeric: numeric.value.im,
            })
        })
        .collect()
}

fn gn_table(rows: &[GnRow]) -> Table {
    let mut t = Table::new("gn_check.csv", &["n", "phi", "moment", "closed", "numeric", "abs_err"]);
    for r in rows {
        let moment = match r.moment {
            GnMoment::Equal => "n",
            GnMoment::OneLess => "n-1",
        };
        t.push(vec![r.n.to_string(), num(r.phi), moment.into(), num(r.closed), num(r.numeric), num(r.abs_err())]);
    }
    t
}

fn direct_rows(pair: &SymbolPair, cfg: &RunConfig, quad: &CosphereQuadrature) -> Result<Vec<WeylCoefficients>, RunError> {
    let opts = WeylOptions {
        jet: JetOptions {
            step: cfg.fd_step,
            ..JetOptions::default()
        },
        ..WeylOptions::default()
    };
    cfg.points
        .par_iter()
        .map(|x| second_weyl(pair, x, quad, &opts).map_err(RunError::from))
        .collect()
}

fn model_label(cfg: &RunConfig) -> String {
    if cfg.params.is_empty() {
        return cfg.model.clone();
    }
    let p: Vec<String> = cfg.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{}({})", cfg.model, p.join(", "))
}

/// Run the configured pipelines. Files are not written here.
pub fn run(cfg: &RunConfig) -> Result<RunReport, RunError> {
    cfg.validate()?;
    let mut report = RunReport {
        tables: Vec::new(),
        checks: Vec::new(),
        direct: Vec::new(),
        recovery: Vec::new(),
        spectral: Vec::new(),
        summary: String::new(),
    };
    let mut lines = Vec::new();
    let p = cfg.pipeline;

    if p == Pipeline::GnCheck {
        let rows = gn_rows(&cfg.gn_dims, &cfg.gn_angles)?;
        let worst = rows.iter().map(GnRow::rel_err).fold(0.0, f64::max);
        lines.push(format!("gn-check   {} integrals, max relative error {worst:.2e}", rows.len()));
        report.checks.push(Check::new("closed-form radial integrals (relative)", worst, cfg.tol.gn));
        report.tables.push(gn_table(&rows));
    } else {
        let model = build_model(&cfg.model, &cfg.params)?;
        let pair = model.symbol_pair();
        let quad = CosphereQuadrature::new(model.space_dim(), cfg.n_angles)?;
        let direct = direct_rows(&pair, cfg, &quad)?;
        if p.includes(Pipeline::Direct) {
            let (lo, hi) = direct
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), w| (l.min(w.second_plus), h.max(w.second_plus)));
            lines.push(format!(
                "direct     {} points, a1+ mean {:.6e}, a0+ in [{lo:.6e}, {hi:.6e}]",
                direct.len(),
                mean(direct.iter().map(|w| w.first_plus))
            ));
            report.tables.push(direct_table(&direct));
        }
        if p.includes(Pipeline::Resolvent) {
            let opts = ResolventOptions {
                jet: JetOptions {
                    step: cfg.fd_step,
                    ..JetOptions::default()
                },
                ..ResolventOptions::default()
            };
            let rec: Vec<Recovery> = cfg
                .points
                .par_iter()
                .map(|x| recover_second_weyl(&pair, x, cfg.angles, &quad, &opts).map_err(RunError::from))
                .collect::<Result<_, _>>()?;
            let (mut two, mut lim, mut b1) = (0.0f64, 0.0f64, 0.0f64);
            for (r, w) in rec.iter().zip(&direct) {
                let s = scale(w.second_plus, w.first_plus);
                two = two.max((r.two_angle - w.second_plus).abs() / s);
                lim = lim.max((r.limit - w.second_plus).abs() / s);
                for b in [&r.b.0, &r.b.1] {
                    let (want, _) = lemma2_b_coefficients(
                        w.first_plus,
                        w.first_minus,
                        w.second_plus,
                        w.second_minus,
                        model.space_dim(),
                        b.phi,
                    )?;
                    b1 = b1.max((b.b1 - want).abs() / w.first_plus.abs());
                }
            }
            lines.push(format!(
                "resolvent  angles ({:.4}, {:.4}), two-angle max rel {two:.2e}, limit max rel {lim:.2e}",
                cfg.angles.0, cfg.angles.1
            ));
            report.checks.push(Check::new("two-angle recovery vs direct (relative)", two, cfg.tol.recovery));
            report.checks.push(Check::new("limit recovery vs direct (relative)", lim, cfg.tol.recovery));
            report.checks.push(Check::new("b1 vs closed form (relative to a1)", b1, cfg.tol.b1));
            report.tables.push(resolvent_table(&cfg.points, &rec));
            report.recovery = rec;
        }
        if p.includes(Pipeline::Spectral) {
            let opts = SpectralFitOptions {
                t_rho: cfg.t_rho,
                window: cfg.window,
                samples: cfg.samples,
                nuisance: cfg.nuisance,
                ..SpectralFitOptions::default()
            };
            let a0 = mean(direct.iter().map(|w| w.second_plus));
            let a1 = mean(direct.iter().map(|w| w.first_plus));
            for &k in &cfg.k_values {
                let spec = assemble_and_solve(&model, &GalerkinOptions::new(k))?;
                let rows = spectral_fit(&spec, &cfg.points, &opts)?;
                let f0 = mean(rows.iter().map(|r| r.fit.second));
                let f1 = mean(rows.iter().map(|r| r.fit.first));
                let e0 = (f0 - a0).abs() / scale(a0, a1);
                let e1 = (f1 - a1).abs() / a1.abs();
                lines.push(format!(
                    "spectral   K={k}: mean a1 fit {f1:.6e} (rel err {e1:.2e}), mean a0 fit {f0:.6e} vs {a0:.6e} (rel err {e0:.2e})"
                ));
                report.checks.push(Check::new(format!("K={k} averaged a1 fit vs direct (relative)"), e1, cfg.tol.spectral));
                report.checks.push(Check::new(format!("K={k} averaged a0 fit vs direct (relative)"), e0, cfg.tol.spectral));
                report.spectral.extend(rows);
            }
            report.tables.push(spectral_table(&report.spectral));
        }
        report.direct = direct;
    }

    let mut s = String::new();
    let _ = writeln!(s, "{TOOL}  model {}  pipeline {}  config {}", model_label(cfg), p.name(), &cfg.hash()[..12]);
    let _ = writeln!(s, "{}", "-".repeat(72));
    for l in &lines {
        let _ = writeln!(s, "{l}");
    }
    if !report.checks.is_empty() {
        let _ = writeln!(s, "{}", "-".repeat(72));
        for c in &report.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "{tag}  {:<48} {:.2e} (tol {:.1e})", c.name, c.value, c.tolerance);
        }
    }
    let _ = writeln!(s, "{}", "-".repeat(72));
    let names: Vec<&str> = report.tables.iter().map(|t| t.name).collect();
    let _ = writeln!(s, "files: {}", names.join(", "));
    report.summary = s;
    Ok(report)
}

/// Process exit code for a finished run.
pub fn exit_code(mode: Mode, result: &Result<RunReport, RunError>) -> i32 {
    match result {
        Ok(r) if mode == Mode::Verify && !r.all_passed() => 3,
        Ok(_) => 0,
        Err(RunError::Config(_)) => 1,
        Err(RunError::Numerical(_)) => 2,
    }
}
