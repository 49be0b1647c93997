// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn spherekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spherekit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    lines
        .map(|l| l.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn euclidean_profile_is_flat() {
    let out = spherekit(&["curvature", "--norm", "lp:2", "--grid", "512"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("# norm: lp:2\n"));
    let rho = column(&csv, "rho");
    let tau = column(&csv, "tau");
    assert_eq!(rho.len(), 512);
    assert!(rho.iter().all(|r| (r - 1.0).abs() <= 1e-8));
    assert!(tau.iter().all(|t| t.abs() <= 1e-8));
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = spherekit(&[
            "curvature",
            "--norm",
            "lp:3",
            "--grid",
            "256",
            "--out",
            path_str(p),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let t1 = spherekit(&["tingley", "--norm-x", "lp:4", "--seed", "11"]);
    let t2 = spherekit(&["tingley", "--norm-x", "lp:4", "--seed", "11"]);
    assert_eq!(t1.stdout, t2.stdout);
}

#[test]
fn tingley_recovers_the_map() {
    let v = stdout_json(&spherekit(&[
        "tingley",
        "--norm-x",
        "lp:4",
        "--map",
        "[[1.2,0.3],[0.1,0.9]]",
    ]));
    let want = [[1.2, 0.3], [0.1, 0.9]];
    for i in 0..2 {
        for j in 0..2 {
            assert!((v["F"][i][j].as_f64().unwrap() - want[i][j]).abs() <= 1e-3);
        }
    }
    assert!(v["max_sphere_residual"].as_f64().unwrap() <= 1e-4);
    assert!(v["curvature_mismatch"]["rho"].as_f64().is_some());
}

#[test]
fn tingley_mismatch_exit_code() {
    let out = spherekit(&["tingley", "--norm-x", "lp:4", "--norm-y", "euclidean"]);
    assert_eq!(out.status.code(), Some(4));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "CurvatureMismatch");
    assert!(err["curvature_mismatch"]["rho"].as_f64().unwrap() > 0.1);
}

#[test]
fn estimate_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let est = dir.path().join("est.csv");
    let cmp = dir.path().join("cmp.csv");
    let v = stdout_json(&spherekit(&[
        "estimate",
        "--norm",
        "lp:4",
        "--eps",
        "1e-2,5e-3,2.5e-3",
        "--grid",
        "256",
        "--out",
        path_str(&est),
        "--compare",
        path_str(&cmp),
    ]));
    assert!(v["max_rho_error"].as_f64().unwrap() <= 1e-2);
    let text = fs::read_to_string(&est).unwrap();
    assert_eq!(column(&text, "rho_hat").len(), 257);
    assert!(text.contains(",rho_positive,"));
    assert_eq!(
        column(&fs::read_to_string(&cmp).unwrap(), "rho_err").len(),
        257
    );
}

#[test]
fn estimate_from_samples() {
    let dir = tempfile::tempdir().unwrap();
    let samples = dir.path().join("samples.csv");
    let mut text = String::from("s,r1,r2\n");
    for k in 0..720 {
        let s = std::f64::consts::TAU * k as f64 / 720.0;
        text.push_str(&format!("{:.17e},{:.17e},{:.17e}\n", s, s.cos(), s.sin()));
    }
    fs::write(&samples, text).unwrap();
    let out = spherekit(&["estimate", "--samples", path_str(&samples), "--grid", "64"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(column(&csv, "rho_hat")
        .iter()
        .all(|r| (r - 1.0).abs() < 1e-3));
    assert!(column(&csv, "tau_hat").iter().all(|t| t.abs() < 1e-3));
}

#[test]
fn reconstruct_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let profile = dir.path().join("profile.csv");
    let curve = dir.path().join("curve.csv");
    let svg = dir.path().join("sphere.svg");
    let out = spherekit(&[
        "curvature",
        "--norm",
        "lp:4",
        "--grid",
        "4096",
        "--out",
        path_str(&profile),
    ]);
    assert!(out.status.success());
    let v = stdout_json(&spherekit(&[
        "reconstruct",
        "--profile",
        path_str(&profile),
        "--norm",
        "lp:4",
        "--out",
        path_str(&curve),
        "--svg",
        path_str(&svg),
    ]));
    assert!(v["max_deviation"].as_f64().unwrap() <= 1e-5);
    assert!(v["antipodal_residual"].as_f64().unwrap() <= 1e-6);
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    assert!(column(&fs::read_to_string(&curve).unwrap(), "r1").len() > 1000);
}

#[test]
fn intrinsic_residual_table() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("pairs.csv");
    let v = stdout_json(&spherekit(&[
        "intrinsic",
        "--norm",
        "euclidean",
        "--pairs",
        "8",
        "--seed",
        "3",
        "--out",
        path_str(&table),
    ]));
    assert!(v["max_residual"].as_f64().unwrap() <= 1e-4);
    assert_eq!(
        column(&fs::read_to_string(&table).unwrap(), "residual").len(),
        8
    );
}

#[test]
fn invariant_report() {
    let v = stdout_json(&spherekit(&[
        "invariants",
        "--norm",
        "lp:3",
        "--grid",
        "256",
    ]));
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);
    assert_eq!(v["checks"].as_array().unwrap().len(), 12);
}

#[test]
fn norm_spec_files() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("norm.toml");
    fs::write(&spec, "kind = \"lp\"\np = 2.0\n").unwrap();
    let arg = format!("@{}", spec.display());
    let out = spherekit(&["curvature", "--norm", &arg, "--grid", "256"]);
    assert!(out.status.success());
    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        r#"{"kind": "radial", "samples": [[0.0, 1.0]], "interpolation": "linear"}"#,
    )
    .unwrap();
    let out = spherekit(&["curvature", "--norm", &format!("@{}", bad.display())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_errors_exit_two() {
    for args in [
        vec!["curvature", "--norm", "lp:0.5"],
        vec!["curvature", "--norm", "hexagon"],
        vec!["curvature", "--norm", "lp:2", "--grid", "4"],
        vec!["estimate", "--norm", "lp:4", "--eps", "1e-2,x"],
        vec!["estimate", "--norm", "lp:4", "--eps", "1e-2,5e-3"],
        vec!["tingley", "--norm-x", "lp:4"],
        vec![
            "tingley",
            "--norm-x",
            "lp:4",
            "--map",
            "[[1,0],[0,1]]",
            "--tol",
            "rho",
        ],
        vec!["reconstruct", "--profile", "/nonexistent/profile.csv"],
        vec!["frobnicate"],
    ] {
        let out = spherekit(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = stderr_json(&out);
        assert!(
            err["error"].is_string() && err["message"].is_string(),
            "{args:?}"
        );
    }
}
