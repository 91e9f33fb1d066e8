//! End-to-end tests of the decph binary: every subcommand, the exit-code
//! contract, and byte-stable reruns.

use std::path::Path;
use std::process::{Command, Output};

fn decph(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decph"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn read_json(path: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(path).expect("readable");
    serde_json::from_str(&text).expect("valid json")
}

fn write_interval_mesh(dir: &Path, cells: usize) -> std::path::PathBuf {
    let out = decph(
        dir,
        &[
            "--out-dir",
            "mesh_out",
            "mesh",
            "--length",
            "1",
            "--cells",
            &cells.to_string(),
        ],
    );
    assert_eq!(exit_code(&out), 0, "{:?}", out);
    dir.join("mesh_out/mesh.json")
}

const STRING_CONFIG: &str = r#"{
  "mesh": {"length": 1.0, "cells": 50},
  "k": 0,
  "variant": "canonical",
  "T": 1.0,
  "mu": 1.0,
  "dt": 0.001,
  "t_end": 2.0,
  "initial": {"u": {"kind": "sine", "amplitude": 1.0, "mode": 1}, "p": {"kind": "zero"}},
  "boundary": {"left": {"kind": "fixed"}, "right": {"kind": "fixed"}}
}"#;

#[test]
fn mesh_writes_interval_with_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = decph(
        dir.path(),
        &["--out-dir", "o", "mesh", "--length", "1", "--cells", "8"],
    );
    assert_eq!(exit_code(&out), 0);
    let mesh = read_json(&dir.path().join("o/mesh.json"));
    assert_eq!(mesh["vertices"].as_array().unwrap().len(), 9);
    let validation = read_json(&dir.path().join("o/validation.json"));
    assert_eq!(validation["pass"], true);
    let entries: Vec<_> = std::fs::read_dir(dir.path().join("o"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.contains("manifest"))
        .collect();
    assert_eq!(entries, vec!["manifest.json"]);
    let manifest = read_json(&dir.path().join("o/manifest.json"));
    assert!(manifest["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .any(|o| o == "mesh.json"));
}

#[test]
fn mesh_rejects_zero_cells_with_usage_exit() {
    let dir = tempfile::tempdir().unwrap();
    let out = decph(dir.path(), &["mesh", "--cells", "0"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn mesh_strip_passes_euler_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = decph(
        dir.path(),
        &["--out-dir", "o", "mesh", "--rows", "1", "--cols", "2"],
    );
    assert_eq!(exit_code(&out), 0);
    let validation = read_json(&dir.path().join("o/validation.json"));
    let euler = validation["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "euler_characteristic")
        .expect("euler check present");
    assert_eq!(euler["pass"], true);
}

#[test]
fn mesh_rejects_mixed_flag_groups() {
    let dir = tempfile::tempdir().unwrap();
    let out = decph(dir.path(), &["mesh", "--cells", "4", "--rows", "2"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn verify_passes_on_interval() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = write_interval_mesh(dir.path(), 2);
    let out = decph(
        dir.path(),
        &["--out-dir", "v", "verify", mesh.to_str().unwrap()],
    );
    assert_eq!(exit_code(&out), 0, "{:?}", out);
    let report = read_json(&dir.path().join("v/verify_report.json"));
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 6);
    assert!(checks.iter().all(|c| c["pass"] == true));
    assert_eq!(report["pass"], true);
}

#[test]
fn verify_passes_on_strip_at_degree_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = decph(
        dir.path(),
        &["--out-dir", "m", "mesh", "--rows", "1", "--cols", "2"],
    );
    assert_eq!(exit_code(&out), 0);
    let out = decph(
        dir.path(),
        &["--out-dir", "v", "verify", "m/mesh.json", "--k", "1"],
    );
    assert_eq!(exit_code(&out), 0, "{:?}", out);
}

#[test]
fn verify_unreadable_mesh_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = decph(dir.path(), &["verify", "no_such_mesh.json"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn verify_corrupted_sign_fails_isotropy() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = write_interval_mesh(dir.path(), 2);
    let out = decph(
        dir.path(),
        &[
            "--out-dir",
            "v",
            "verify",
            mesh.to_str().unwrap(),
            "--corrupt-sign",
        ],
    );
    assert_eq!(exit_code(&out), 1);
    let report = read_json(&dir.path().join("v/verify_report.json"));
    let isotropy = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "isotropy")
        .unwrap();
    assert_eq!(isotropy["pass"], false);
    assert!(isotropy["residual"].as_f64().unwrap() >= 1e-3);
}

#[test]
fn verify_reruns_byte_identical_at_same_seed() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = write_interval_mesh(dir.path(), 5);
    for out_dir in ["v1", "v2"] {
        let out = decph(
            dir.path(),
            &[
                "--seed",
                "7",
                "--out-dir",
                out_dir,
                "verify",
                mesh.to_str().unwrap(),
            ],
        );
        assert_eq!(exit_code(&out), 0);
    }
    let a = std::fs::read(dir.path().join("v1/verify_report.json")).unwrap();
    let b = std::fs::read(dir.path().join("v2/verify_report.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn verify_dumps_operators_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = write_interval_mesh(dir.path(), 4);
    let out = decph(
        dir.path(),
        &[
            "--out-dir",
            "v",
            "verify",
            mesh.to_str().unwrap(),
            "--dump-operators",
        ],
    );
    assert_eq!(exit_code(&out), 0);
    let d0 = std::fs::read_to_string(dir.path().join("v/operators/d0.txt")).unwrap();
    let (header, body) = d0.split_once('\n').unwrap();
    let descriptor: serde_json::Value = serde_json::from_str(header).unwrap();
    assert_eq!(descriptor["operator"], "d0");
    assert_eq!(descriptor["nnz"], 8);
    assert_eq!(body.lines().count(), 8);
}

#[test]
fn reduce_writes_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = write_interval_mesh(dir.path(), 3);
    let out = decph(
        dir.path(),
        &["--out-dir", "r", "reduce", mesh.to_str().unwrap()],
    );
    assert_eq!(exit_code(&out), 0, "{:?}", out);
    let report = read_json(&dir.path().join("r/reduction_report.json"));
    assert_eq!(report["isotropy_pass"], true);
    assert_eq!(report["sign_conversion_pass"], true);
    assert!(report["commutation_residual"].as_f64().unwrap() <= 1e-14);
}

#[test]
fn simulate_closed_string_conserves_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.json"), STRING_CONFIG).unwrap();
    for out_dir in ["s1", "s2"] {
        let out = decph(dir.path(), &["--out-dir", out_dir, "simulate", "run.json"]);
        assert_eq!(exit_code(&out), 0, "{:?}", out);
    }
    let csv = std::fs::read_to_string(dir.path().join("s1/trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,H,P_b,E_b_cumulative,balance_residual"
    );
    let h: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(h.len(), 2001);
    let h0 = h[0];
    for hi in &h {
        assert!((hi - h0).abs() <= 1e-12 * h0, "energy drifted: {}", hi);
    }
    for name in ["trajectory.csv", "states.json"] {
        let a = std::fs::read(dir.path().join("s1").join(name)).unwrap();
        let b = std::fs::read(dir.path().join("s2").join(name)).unwrap();
        assert_eq!(a, b, "{} differs between reruns", name);
    }
}

#[test]
fn simulate_missing_tension_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let config = STRING_CONFIG.replace("\n  \"T\": 1.0,", "");
    std::fs::write(dir.path().join("run.json"), config).unwrap();
    let out = decph(dir.path(), &["simulate", "run.json"]);
    assert_eq!(exit_code(&out), 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("T"), "stderr: {}", stderr);
}

#[test]
fn simulate_bad_field_kind_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let config = STRING_CONFIG.replace("\"sine\"", "\"wavelet\"");
    std::fs::write(dir.path().join("run.json"), config).unwrap();
    let out = decph(dir.path(), &["simulate", "run.json"]);
    assert_eq!(exit_code(&out), 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("initial.u.kind"), "stderr: {}", stderr);
}

#[test]
fn simulate_compare_reduced_stays_close() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.json"), STRING_CONFIG).unwrap();
    let out = decph(
        dir.path(),
        &["--out-dir", "s", "simulate", "run.json", "--compare-reduced"],
    );
    assert_eq!(exit_code(&out), 0, "{:?}", out);
    let csv = std::fs::read_to_string(dir.path().join("s/trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,H,P_b,E_b_cumulative,balance_residual,sup_distance_reduced"
    );
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 6);
        let sup: f64 = fields[5].parse().unwrap();
        assert!(sup <= 1e-9, "trajectories diverged: {}", sup);
    }
}

#[test]
fn simulate_compare_reduced_needs_canonical_variant() {
    let dir = tempfile::tempdir().unwrap();
    let config = STRING_CONFIG.replace("\"canonical\"", "\"reduced\"");
    std::fs::write(dir.path().join("run.json"), config).unwrap();
    let out = decph(
        dir.path(),
        &["simulate", "run.json", "--compare-reduced"],
    );
    assert_eq!(exit_code(&out), 2);
}
