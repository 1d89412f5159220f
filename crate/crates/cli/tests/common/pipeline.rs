#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cohesion"));
    for var in ["COHESION_BUNDLE", "COHESION_STORE", "COHESION_BIND", "COHESION_ADMIN_TOKEN", "RUST_LOG"] {
        c.env_remove(var);
    }
    c
}

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed ({:?}): {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Units files for the five study techniques over the fixture timelines.
pub fn unitize_study(dir: &Path) -> Vec<PathBuf> {
    let fx = fixtures();
    let mut files = Vec::new();
    for (name, extra) in [
        ("aut8", vec!["--technique", "aut", "--window", "8", "--tail", "drop"]),
        ("aut15", vec!["--technique", "aut", "--window", "15", "--tail", "drop"]),
        ("aut21", vec!["--technique", "aut", "--window", "21", "--tail", "drop"]),
        ("act", vec!["--technique", "act"]),
        ("est", vec!["--technique", "est"]),
    ] {
        let out = dir.join(format!("{name}.csv"));
        let mut args = vec!["unitize"];
        args.extend(extra);
        args.extend(["--in", s(&fx), "--out", s(&out)]);
        run_ok(&args);
        files.push(out);
    }
    files
}

/// Simulates raters into `dir` and analyzes into `dir/report`.
pub fn simulate_and_analyze(units: &[PathBuf], dir: &Path, seed: u64, extra: &[&str]) -> (Vec<u8>, Vec<u8>) {
    let seed = seed.to_string();
    let mut args = vec!["--seed", &seed, "--out-dir", s(dir), "simulate-raters", "--units"];
    args.extend(units.iter().map(|u| s(u)));
    args.extend(extra);
    run_ok(&args);
    let report = dir.join("report");
    let ratings = dir.join("ratings.csv");
    let expert = dir.join("expert.csv");
    let mut args = vec!["--out-dir", s(&report), "analyze", "--ratings", s(&ratings), "--expert", s(&expert), "--units"];
    args.extend(units.iter().map(|u| s(u)));
    run_ok(&args);
    (
        std::fs::read(report.join("report.json")).unwrap(),
        std::fs::read(report.join("report.txt")).unwrap(),
    )
}

/// Every ICC estimate over `(technique, dimension)` cells; None if a cell errored.
pub fn icc_values(report_json: &[u8]) -> Vec<(String, Option<f64>)> {
    let v: serde_json::Value = serde_json::from_slice(report_json).unwrap();
    v["icc"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            let name = format!("{}/{}", c["technique"].as_str().unwrap(), c["dimension"].as_str().unwrap());
            (name, c["result"]["ok"]["icc"].as_f64())
        })
        .collect()
}

/// Every per-interaction MSE in the report.
pub fn mse_values(report_json: &[u8]) -> Vec<f64> {
    let v: serde_json::Value = serde_json::from_slice(report_json).unwrap();
    v["information_loss"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|d| d["mse"].as_object().unwrap().values())
        .flat_map(|per| per.as_object().unwrap().values().map(|x| x.as_f64().unwrap()))
        .collect()
}
