use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn weylsys(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weylsys"))
        .args(args)
        .env_remove("THREADS")
        .output()
        .expect("binary runs")
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config_hash="));
    let body: String = lines.map(|l| format!("{l}\n")).collect();
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    rdr.records().map(|r| r.unwrap().iter().map(str::to_string).collect()).collect()
}

#[test]
fn compute_dirac_direct() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = weylsys(&["compute", "--model", "dirac", "--pipeline", "direct", "--out", out, "--points", "0.4,1.2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&dir.path().join("weyl_coefficients.csv"));
    let plus = rows.iter().find(|r| r[2] == "plus").unwrap();
    let a1: f64 = plus[3].parse().unwrap();
    let a0: f64 = plus[4].parse().unwrap();
    assert!((a1 - 0.159155).abs() < 1e-6);
    assert!(a0.abs() < 1e-12);
}

#[test]
fn identical_config_gives_identical_files() {
    let cfg = "model = twisted\npipeline = all\nspectral.k = 12\npoints = 0.3, 0.3; 1.1, 0.3\n";
    let root = tempfile::tempdir().unwrap();
    let path = root.path().join("run.cfg");
    fs::write(&path, cfg).unwrap();
    let mut outputs = Vec::new();
    for (name, threads) in [("a", "1"), ("b", "3")] {
        let out = root.path().join(name);
        let o = Command::new(env!("CARGO_BIN_EXE_weylsys"))
            .args(["compute", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()])
            .env("THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(out);
    }
    for f in ["weyl_coefficients.csv", "resolvent_recovery.csv", "spectral_fit.csv"] {
        let a = fs::read(outputs[0].join(f)).unwrap();
        let b = fs::read(outputs[1].join(f)).unwrap();
        assert_eq!(a, b, "{f} differs");
    }
    assert!(!outputs[0].join(".spectral_fit.csv.tmp").exists());
}

#[test]
fn malformed_config_exits_one() {
    let root = tempfile::tempdir().unwrap();
    let path = root.path().join("bad.cfg");
    fs::write(&path, "model = dirac\nmollifier.colour = blue\n").unwrap();
    let o = weylsys(&["compute", "--config", path.to_str().unwrap(), "--out", root.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mollifier.colour"));
    let o = weylsys(&["compute", "--angles", "0.5,4.0"]);
    assert_eq!(o.status.code(), Some(1));
    let o = weylsys(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn non_elliptic_model_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = weylsys(&["verify", "--model", "twisted", "--eps", "0.9", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ellipticity"));
}

#[test]
fn failed_tolerance_exits_three_only_in_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = ["--set", "tolerance.gn=1e-300", "--set", "gn.dims=2", "--out", out];
    let o = weylsys(&[&["gn-check"][..], &args[..]].concat());
    assert_eq!(o.status.code(), Some(0));
    let o = weylsys(&[&["verify", "--pipeline", "gn-check"][..], &args[..]].concat());
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn gn_check_and_resolvent_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(weylsys(&["gn-check", "--out", out]).status.code(), Some(0));
    let rows = csv_rows(&dir.path().join("gn_check.csv"));
    assert_eq!(rows.len(), 40);
    for r in &rows {
        assert!(r[5].parse::<f64>().unwrap() < 1e-10);
    }
    let o = weylsys(&["resolvent", "--model", "twisted", "--points", "0.5,0.3", "--out", out]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&dir.path().join("resolvent_recovery.csv"));
    assert_eq!(rows.len(), 2);
    let a0: f64 = rows[0][5].parse().unwrap();
    assert!((a0 - 0.0069917869101987342).abs() < 1e-9);
}

#[test]
fn models_lists_catalog() {
    let o = weylsys(&["models"]);
    assert_eq!(o.status.code(), Some(0));
    let s = String::from_utf8_lossy(&o.stdout);
    for m in ["dirac", "shifted-dirac", "mass-dirac", "twisted"] {
        assert!(s.contains(m));
    }
}
