use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use weylsys_cli::config::{ConfigError, RunConfig};
use weylsys_cli::run::{exit_code, run, Mode, RunError};
use weylsys_spectral::CATALOG;

#[derive(Parser)]
#[command(name = "weylsys", version, about = "Local Weyl coefficients of first-order matrix systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured pipeline and write reports.
    Compute(RunArgs),
    /// Run all pipelines and fail with exit code 3 if a check misses its tolerance.
    Verify(RunArgs),
    /// Resolvent recovery together with the direct reference.
    Resolvent(RunArgs),
    /// Compare closed-form radial integrals with quadrature.
    GnCheck(RunArgs),
    /// List the model catalog.
    Models,
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    /// Configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    /// direct, resolvent, spectral, all or gn-check.
    #[arg(long)]
    pipeline: Option<String>,
    /// Twist amplitude (twisted).
    #[arg(long)]
    eps: Option<String>,
    /// Scalar shift (shifted-dirac).
    #[arg(long)]
    beta: Option<String>,
    /// Mass (mass-dirac).
    #[arg(long)]
    mass: Option<String>,
    /// Galerkin truncations, comma separated.
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    t_rho: Option<String>,
    #[arg(long)]
    n_angles: Option<String>,
    /// Two recovery angles, comma separated.
    #[arg(long)]
    angles: Option<String>,
    /// Points `x1,x2;x1,x2;...`.
    #[arg(long)]
    points: Option<String>,
    /// Any configuration key, `key=value`; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn build_config(args: &RunArgs, base: Option<&str>, forced: Option<&str>) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    if let Some(p) = base {
        cfg.set("pipeline", p)?;
    }
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    let pairs = [
        ("model", &args.model),
        ("pipeline", &args.pipeline),
        ("model.eps", &args.eps),
        ("model.beta", &args.beta),
        ("model.b", &args.mass),
        ("spectral.k", &args.k),
        ("mollifier.t_rho", &args.t_rho),
        ("quadrature.n_angles", &args.n_angles),
        ("angles", &args.angles),
        ("points", &args.points),
    ];
    for (key, v) in pairs {
        if let Some(v) = v {
            cfg.set(key, v)?;
        }
    }
    for kv in &args.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: 0,
            message: format!("--set expects KEY=VALUE, found `{kv}`"),
        })?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(p) = forced {
        cfg.set("pipeline", p)?;
    }
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    Ok(cfg)
}

fn execute(args: &RunArgs, mode: Mode, base: Option<&str>, forced: Option<&str>) -> i32 {
    let result = build_config(args, base, forced)
        .map_err(RunError::from)
        .and_then(|cfg| {
            let report = run(&cfg)?;
            report
                .write(&cfg)
                .map_err(|e| RunError::Config(ConfigError::Io(format!("{}: {e}", cfg.out_dir.display()))))?;
            Ok(report)
        });
    match &result {
        Ok(r) => print!("{}", r.summary),
        Err(e) => eprintln!("weylsys: {e}"),
    }
    exit_code(mode, &result)
}

fn main() -> ExitCode {
    if let Ok(t) = std::env::var("THREADS") {
        match t.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("weylsys: THREADS must be a positive integer");
                return ExitCode::from(1);
            }
        }
    }
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let code = match &cli.command {
        Command::Compute(a) => execute(a, Mode::Compute, None, None),
        Command::Verify(a) => execute(a, Mode::Verify, Some("all"), None),
        Command::Resolvent(a) => execute(a, Mode::Compute, None, Some("resolvent")),
        Command::GnCheck(a) => execute(a, Mode::Compute, None, Some("gn-check")),
        Command::Models => {
            for m in CATALOG {
                let params: Vec<String> = m.params.iter().map(|p| format!("{}={} ({})", p.name, p.default, p.description)).collect();
                println!("{:<14} {}", m.name, m.description);
                if !params.is_empty() {
                    println!("{:<14} params: {}", "", params.join(", "));
                }
            }
            0
        }
    };
    ExitCode::from(code as u8)
}
