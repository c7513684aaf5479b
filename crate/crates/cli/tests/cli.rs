use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lyochaos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lyochaos")).args(args).output().expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

/// Every file except the wall-clock record.
fn deterministic_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| !p.file_name().unwrap().to_str().unwrap().starts_with("timing"))
        .map(|p| (p.file_name().unwrap().to_str().unwrap().to_string(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn csv_column(path: &Path, col: usize) -> Vec<f64> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap()[col].parse().unwrap()).collect()
}

#[test]
fn repeated_uq_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let o = lyochaos(&["uq", "--case", "a2", "--method", "both", "--samples", "40", "--quiet", "--out", &out_arg(dir)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (fa, fb) = (deterministic_files(&a), deterministic_files(&b));
    assert!(fa.len() > 5);
    assert_eq!(fa, fb);
    assert!(a.join("timing.json").exists());
}

#[test]
fn zero_kinetics_keeps_bound_water_flat() {
    let tmp = tempfile::tempdir().unwrap();
    let o = lyochaos(&[
        "simulate-secondary",
        "--set",
        "f_a=0",
        "--t-end",
        "3",
        "--points",
        "31",
        "--out",
        &out_arg(tmp.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let cw = csv_column(&tmp.path().join("trajectory.csv"), 1);
    assert_eq!(cw.len(), 31);
    assert!(cw.iter().all(|&c| (c - cw[0]).abs() < 1e-12), "{cw:?}");
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("summary.json")).unwrap()).unwrap();
    assert!(summary["drying_time_s"].is_null());
}

#[test]
fn primary_simulation_writes_unit_headers_and_finishes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = lyochaos(&["simulate-primary", "--out", &out_arg(tmp.path())]);
    assert!(o.status.success());
    let text = fs::read_to_string(tmp.path().join("trajectory.csv")).unwrap();
    assert!(text.starts_with("time_s,front_position_m,"));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("summary.json")).unwrap()).unwrap();
    assert!(summary["drying_time_s"].as_f64().unwrap() > 0.0);
    assert_eq!(summary["config"]["command"], "simulate-primary");
}

#[test]
fn infeasible_design_exits_with_5() {
    let tmp = tempfile::tempdir().unwrap();
    let o = lyochaos(&["design", "--tb-lower", "295", "--tb-upper", "296", "--quiet", "--out", &out_arg(tmp.path())]);
    assert_eq!(o.status.code(), Some(5));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("295") && err.contains("296"), "{err}");
}

#[test]
fn unknown_config_key_exits_with_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, "[study]\nmc_sampels = 10\n").unwrap();
    let o = lyochaos(&["uq", "--config", cfg.to_str().unwrap(), "--out", &out_arg(&tmp.path().join("o"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mc_sampels"));
}

#[test]
fn bad_values_exit_with_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = out_arg(tmp.path());
    for args in [
        vec!["simulate-secondary", "--set", "no_such_field=1", "--out", &out],
        vec!["simulate-secondary", "--set", "h=-3", "--out", &out],
        vec!["uq", "--case", "z9", "--out", &out],
        vec!["oat", "--input", "nonsense", "--out", &out],
        vec!["design", "--method", "both", "--out", &out],
        vec!["benchmark", "--case", "c7", "--out", &out],
    ] {
        let o = lyochaos(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn config_file_and_flags_combine() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, "[overrides]\nh = 20.0\n\n[simulation]\npoints = 11\n").unwrap();
    let out = tmp.path().join("o");
    let o = lyochaos(&["simulate-secondary", "--config", cfg.to_str().unwrap(), "--set", "f_a=0.45", "--out", &out_arg(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["overrides"]["h"], 20.0);
    assert_eq!(summary["config"]["overrides"]["f_a"], 0.45);
    assert_eq!(csv_column(&out.join("trajectory.csv"), 0).len(), 11);
}
