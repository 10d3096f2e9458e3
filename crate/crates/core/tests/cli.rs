use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn firmdyn(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_firmdyn"))
        .args(args)
        .env("FIRMDYN_OUT_DIR", out)
        .output()
        .unwrap()
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = match fs::read_dir(dir) {
        Ok(rd) => rd.map(|e| e.unwrap().file_name().into_string().unwrap()).collect(),
        Err(_) => Vec::new(),
    };
    v.sort();
    v
}

fn write_cfg(dir: &TempDir, text: &str) -> String {
    let p = dir.path().join("run.cfg");
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn steady_writes_its_artifacts_deterministically() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("a");
    let first = firmdyn(&out, &["steady"]);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let names = files(&out);
    assert!(names.contains(&"steady_summary.txt".to_string()));
    assert!(names.contains(&"steady_grid.csv".to_string()));
    let grid = fs::read_to_string(out.join("steady_grid.csv")).unwrap();
    assert!(grid.starts_with("log_z,value,labor,exit_prob,entry_prob,mass\n"));
    assert_eq!(grid.lines().count(), 51);

    let again = dir.path().join("b");
    assert!(firmdyn(&again, &["steady"]).status.success());
    for n in &names {
        assert_eq!(fs::read(out.join(n)).unwrap(), fs::read(again.join(n)).unwrap(), "{n}");
    }
}

#[test]
fn configuration_errors_exit_with_two_and_write_nothing() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let cfg = write_cfg(&dir, "nu = 0.5\nno_such_key = 1\n");
    let r = firmdyn(&out, &["steady", &cfg]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("error[config]"));
    assert!(files(&out).is_empty());

    let r = firmdyn(&out, &["variant", "no_such_variant"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(files(&out).is_empty());
}

#[test]
fn indeterminacy_exits_with_one_and_writes_nothing() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let cfg = write_cfg(&dir, "phi = 0.9\n");
    let r = firmdyn(&out, &["irf", &cfg]);
    assert_eq!(r.status.code(), Some(1));
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(err.contains("indeterminate"), "{err}");
    assert!(files(&out).is_empty());
}

#[test]
fn irf_for_both_models() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    assert!(firmdyn(&out, &["irf"]).status.success());
    assert!(firmdyn(&out, &["irf", "--model", "rf"]).status.success());
    let names = files(&out);
    for n in ["irf_hf_baseline.csv", "irf_rf_baseline.csv", "irf_hf_baseline_summary.csv"] {
        assert!(names.iter().any(|x| x == n), "{n} missing from {names:?}");
    }
    let hf = fs::read_to_string(out.join("irf_hf_baseline.csv")).unwrap();
    let header: Vec<&str> = hf.lines().next().unwrap().split(',').collect();
    assert_eq!(&header[..3], &["horizon", "model", "variant"]);
    assert_eq!(hf.lines().count(), 42);
}

#[test]
fn zero_shock_decomposition_is_zero() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let cfg = write_cfg(&dir, "normalization = innovation\nshock_size = 0\n");
    let r = firmdyn(&out, &["decompose", &cfg]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let text = fs::read_to_string(out.join("fig6_contributions.csv")).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[0], "horizon");
    for line in lines {
        for v in line.split(',').skip(1) {
            assert!(v.parse::<f64>().unwrap().abs() < 1e-8, "{line}");
        }
    }
}
