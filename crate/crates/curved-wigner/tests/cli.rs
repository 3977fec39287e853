//! End-to-end exercises of the command-line interface: exit codes, file
//! outputs and determinism of the CSV bodies.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_curved-wigner"))
}

fn write_config(dir: &std::path::Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn run_precession_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"scenario": "precession", "parameters": {"M": 1.0, "R": 6.0, "steps": 8}}"#,
    );
    let out = bin()
        .arg("run")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .arg("--format")
        .arg("csv,json")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("[PASS]"), "stdout: {stdout}");
    assert!(dir.path().join("out/precession-precession.csv").exists());
    assert!(dir.path().join("out/precession-frames.csv").exists());
    assert!(dir.path().join("out/precession.json").exists());
    let body = std::fs::read_to_string(dir.path().join("out/precession-precession.csv")).unwrap();
    let value: f64 = body
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((value - 1.8403023690212202).abs() < 1e-12);
}

#[test]
fn config_error_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"scenario": "precession", "parameters": {}}"#,
    );
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let missing = bin()
        .arg("run")
        .arg(dir.path().join("nope.json"))
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn photon_sphere_violation_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"scenario": "circular-corrections", "parameters": {"M": 1.0, "R": 2.5}}"#,
    );
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sweep_produces_ordered_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"scenario": "precession", "parameters": {"M": 1.0, "steps": 4}}"#,
    );
    let out = bin()
        .arg("sweep")
        .arg(&cfg)
        .args([
            "--param", "R", "--start", "6", "--stop", "20", "--count", "8",
        ])
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let body = std::fs::read_to_string(dir.path().join("out/precession-sweep-R.csv")).unwrap();
    let rows: Vec<&str> = body.lines().skip(1).collect();
    assert_eq!(rows.len(), 8);
    let angles: Vec<f64> = rows
        .iter()
        .map(|r| r.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    for w in angles.windows(2) {
        assert!(w[0] > w[1], "precession decreases with R");
    }
}
