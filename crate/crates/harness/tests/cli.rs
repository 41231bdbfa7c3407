use std::process::Command;

use latwave_harness::config::{ExperimentConfig, ExperimentId};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_latwave"))
}

#[test]
fn unknown_experiment_is_a_config_error() {
    let out = bin().args(["experiment", "E9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "experiment = \"E1\"\nn = 1\nwindow = 1.0\nbogus = 3\n").unwrap();
    let out = bin().args(["experiment", "E1", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn inadmissible_lattice_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::default_for(ExperimentId::E1, 1);
    cfg.lattice.dt = 2.0 * cfg.lattice.dx;
    let path = dir.path().join("cfl.toml");
    std::fs::write(&path, cfg.to_toml().unwrap()).unwrap();
    let out = bin().args(["solve", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dispersion_reports_beta() {
    let out = bin().args(["dispersion", "--alpha", "1,2", "--dx", "0.1", "--dt", "0.05"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let beta: f64 = text
        .lines()
        .find(|l| l.starts_with("beta "))
        .and_then(|l| l.split('=').nth(1))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!((beta - latwave::beta(&[1.0, 2.0], 0.1, 0.05).unwrap()).abs() == 0.0);
}

#[test]
fn dispersion_beyond_cfl_fails() {
    let out = bin().args(["dispersion", "--alpha", "31.4", "--dx", "0.1", "--dt", "0.2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn experiment_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["experiment", "e6", "--out"]).arg(dir.path()).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(dir.path().join("e6_summary.txt").exists());
}

#[test]
fn solve_writes_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::default_for(ExperimentId::E1, 1);
    cfg.out = Some(dir.path().join("snap"));
    let path = dir.path().join("solve.toml");
    std::fs::write(&path, cfg.to_toml().unwrap()).unwrap();
    let out = bin().args(["solve", "--config"]).arg(&path).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for p in ["level_0.bin", "level_-8.bin"] {
        let meta = std::fs::metadata(dir.path().join("snap").join(p));
        assert!(meta.is_ok(), "{p} missing");
    }
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let out = bin().env("HARNESS_THREADS", "many").args(["experiment", "E2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
