//! Run configuration and its line-oriented grammar.
//!
//! One `key = value` pair per line; `#` starts a comment; blank lines are
//! ignored. Keys are dotted (`model.eps`, `mollifier.t_rho`). Lists are
//! comma separated, point lists use `;` between points. See `docs/config.md`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use sha2::{Digest, Sha256};
use thiserror::Error;
use weylsys_spectral::CATALOG;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: {message}")]
    InvalidValue { key: String, message: String },
    #[error("{0}")]
    Io(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pipeline {
    Direct,
    Resolvent,
    Spectral,
    All,
    GnCheck,
}

impl Pipeline {
    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Direct => "direct",
            Pipeline::Resolvent => "resolvent",
            Pipeline::Spectral => "spectral",
            Pipeline::All => "all",
            Pipeline::GnCheck => "gn-check",
        }
    }

    pub fn includes(self, other: Pipeline) -> bool {
        self == other || (self == Pipeline::All && other != Pipeline::GnCheck)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    /// Relative agreement of resolvent recovery with the direct formula.
    pub recovery: f64,
    /// Agreement of `b_1` with its closed form, relative to `a_1`.
    pub b1: f64,
    /// Relative error of closed-form radial integrals.
    pub gn: f64,
    /// Relative error of the point-averaged fitted `a_0`.
    pub spectral: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: String,
    pub params: BTreeMap<String, f64>,
    pub pipeline: Pipeline,
    pub n_angles: usize,
    pub fd_step: f64,
    /// Angles for two-angle recovery.
    pub angles: (f64, f64),
    pub k_values: Vec<usize>,
    pub t_rho: f64,
    pub window: (f64, f64),
    pub samples: usize,
    pub nuisance: bool,
    pub points: Vec<Vec<f64>>,
    pub gn_dims: Vec<u32>,
    pub gn_angles: Vec<f64>,
    pub out_dir: PathBuf,
    pub tol: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: "dirac".into(),
            params: BTreeMap::new(),
            pipeline: Pipeline::Direct,
            n_angles: 256,
            fd_step: weylsys_core::symbol::DEFAULT_FD_STEP,
            angles: (PI / 3.0, 2.0 * PI / 3.0),
            k_values: vec![32],
            t_rho: weylsys_spectral::DEFAULT_T_RHO,
            window: (0.2, 0.6),
            samples: 81,
            nuisance: false,
            points: (0..8).map(|i| vec![0.1 + 0.2 * i as f64, 0.3]).collect(),
            gn_dims: vec![2, 3, 4, 5],
            gn_angles: (1..=5).map(|k| k as f64 * PI / 6.0).collect(),
            out_dir: PathBuf::from("out"),
            tol: Tolerances {
                recovery: 1e-4,
                b1: 1e-6,
                gn: 1e-6,
                spectral: 0.15,
            },
        }
    }
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.to_string(),
        message: message.into(),
    }
}

fn real(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = v.trim().parse().map_err(|_| invalid(key, format!("`{v}` is not a number")))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(key, "not finite"))
    }
}

fn count(key: &str, v: &str) -> Result<usize, ConfigError> {
    v.trim().parse().map_err(|_| invalid(key, format!("`{v}` is not a non-negative integer")))
}

fn list<T>(key: &str, v: &str, f: impl Fn(&str, &str) -> Result<T, ConfigError>) -> Result<Vec<T>, ConfigError> {
    let items: Vec<&str> = v.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(invalid(key, "empty list"));
    }
    items.into_iter().map(|s| f(key, s)).collect()
}

fn boolean(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v.trim() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => Err(invalid(key, format!("`{other}` is not a boolean"))),
    }
}

fn fmt_list<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl RunConfig {
    /// Parse a configuration text on top of the defaults.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                message: format!("expected `key = value`, found `{line}`"),
            })?;
            let key = key.trim();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    message: format!("malformed key `{key}`"),
                });
            }
            self.set(key, value.trim())?;
        }
        Ok(())
    }

    /// Set one key.
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), ConfigError> {
        match key {
            "model" | "model.name" => self.model = v.to_string(),
            "pipeline" => {
                self.pipeline = match v {
                    "direct" => Pipeline::Direct,
                    "resolvent" => Pipeline::Resolvent,
                    "spectral" => Pipeline::Spectral,
                    "all" => Pipeline::All,
                    "gn-check" => Pipeline::GnCheck,
                    other => return Err(invalid(key, format!("unknown pipeline `{other}`"))),
                }
            }
            "quadrature.n_angles" => self.n_angles = count(key, v)?,
            "quadrature.fd_step" => self.fd_step = real(key, v)?,
            "angles" => {
                let a = list(key, v, real)?;
                if a.len() != 2 {
                    return Err(invalid(key, "expected two angles"));
                }
                self.angles = (a[0], a[1]);
            }
            "spectral.k" => self.k_values = list(key, v, count)?,
            "spectral.nuisance" => self.nuisance = boolean(key, v)?,
            "mollifier.t_rho" => self.t_rho = real(key, v)?,
            "mollifier.window" => {
                let w = list(key, v, real)?;
                if w.len() != 2 {
                    return Err(invalid(key, "expected `lo, hi` fractions of K"));
                }
                self.window = (w[0], w[1]);
            }
            "mollifier.samples" => self.samples = count(key, v)?,
            "points" => {
                self.points = v
                    .split(';')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|p| list(key, p, real))
                    .collect::<Result<_, _>>()?;
            }
            "gn.dims" => {
                self.gn_dims = list(key, v, |k, s| count(k, s).map(|d| d as u32))?;
            }
            "gn.angles" => self.gn_angles = list(key, v, real)?,
            "output.dir" => self.out_dir = PathBuf::from(v),
            "tolerance.recovery" => self.tol.recovery = real(key, v)?,
            "tolerance.b1" => self.tol.b1 = real(key, v)?,
            "tolerance.gn" => self.tol.gn = real(key, v)?,
            "tolerance.spectral" => self.tol.spectral = real(key, v)?,
            _ => match key.strip_prefix("model.") {
                Some(p) if !p.is_empty() => {
                    self.params.insert(p.to_string(), real(key, v)?);
                }
                _ => return Err(ConfigError::UnknownKey(key.to_string())),
            },
        }
        Ok(())
    }

    /// Check names and ranges.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let info = CATALOG
            .iter()
            .find(|m| m.name == self.model)
            .ok_or_else(|| invalid("model", format!("unknown model `{}`", self.model)))?;
        for p in self.params.keys() {
            if !info.params.iter().any(|s| s.name == p) {
                return Err(ConfigError::UnknownKey(format!("model.{p}")));
            }
        }
        let angle_ok = |a: f64| a > 0.0 && a < PI;
        if !angle_ok(self.angles.0) || !angle_ok(self.angles.1) || self.angles.0 == self.angles.1 {
            return Err(invalid("angles", "need two distinct angles in (0, pi)"));
        }
        if let Some(a) = self.gn_angles.iter().find(|a| !angle_ok(**a)) {
            return Err(invalid("gn.angles", format!("{a} outside (0, pi)")));
        }
        if let Some(d) = self.gn_dims.iter().find(|d| **d < 2) {
            return Err(invalid("gn.dims", format!("dimension {d} below 2")));
        }
        if self.n_angles < 8 {
            return Err(invalid("quadrature.n_angles", "at least 8"));
        }
        if !(self.fd_step > 0.0 && self.fd_step < 0.1) {
            return Err(invalid("quadrature.fd_step", "must lie in (0, 0.1)"));
        }
        if let Some(k) = self.k_values.iter().find(|k| **k < 8) {
            return Err(invalid("spectral.k", format!("K = {k} below 8")));
        }
        if !(self.t_rho > 0.0 && self.t_rho < 2.0 * PI) {
            return Err(invalid("mollifier.t_rho", "must lie in (0, 2 pi)"));
        }
        let (lo, hi) = self.window;
        if !(lo > 0.0 && hi > lo && hi <= weylsys_spectral::galerkin::TRUSTED_FRACTION) {
            return Err(invalid("mollifier.window", "need 0 < lo < hi <= 0.6"));
        }
        if self.samples < 8 {
            return Err(invalid("mollifier.samples", "at least 8"));
        }
        if self.points.is_empty() || self.points.iter().any(|p| p.len() != 2) {
            return Err(invalid("points", "need one or more points with 2 coordinates"));
        }
        let t = &self.tol;
        if [t.recovery, t.b1, t.gn, t.spectral].iter().any(|v| *v <= 0.0) {
            return Err(invalid("tolerance", "tolerances must be positive"));
        }
        Ok(())
    }

    /// Canonical text form; every key appears once in a fixed order.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "model = {}", self.model);
        for (k, v) in &self.params {
            let _ = writeln!(s, "model.{k} = {v}");
        }
        let _ = writeln!(s, "pipeline = {}", self.pipeline.name());
        let _ = writeln!(s, "quadrature.n_angles = {}", self.n_angles);
        let _ = writeln!(s, "quadrature.fd_step = {}", self.fd_step);
        let _ = writeln!(s, "angles = {}, {}", self.angles.0, self.angles.1);
        let _ = writeln!(s, "spectral.k = {}", fmt_list(&self.k_values));
        let _ = writeln!(s, "spectral.nuisance = {}", self.nuisance);
        let _ = writeln!(s, "mollifier.t_rho = {}", self.t_rho);
        let _ = writeln!(s, "mollifier.window = {}, {}", self.window.0, self.window.1);
        let _ = writeln!(s, "mollifier.samples = {}", self.samples);
        let pts: Vec<String> = self.points.iter().map(|p| fmt_list(p)).collect();
        let _ = writeln!(s, "points = {}", pts.join("; "));
        let _ = writeln!(s, "gn.dims = {}", fmt_list(&self.gn_dims));
        let _ = writeln!(s, "gn.angles = {}", fmt_list(&self.gn_angles));
        let _ = writeln!(s, "tolerance.recovery = {}", self.tol.recovery);
        let _ = writeln!(s, "tolerance.b1 = {}", self.tol.b1);
        let _ = writeln!(s, "tolerance.gn = {}", self.tol.gn);
        let _ = writeln!(s, "tolerance.spectral = {}", self.tol.spectral);
        s
    }

    /// SHA-256 of the canonical form. The output directory is not part of it.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}
