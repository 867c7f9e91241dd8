use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .canonicalize()
        .unwrap()
}

fn write_config(dir: &Path, value: &Value) -> PathBuf {
    let path = dir.join("experiment.json");
    fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

fn effbasis(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_effbasis"))
        .args(args)
        .output()
        .unwrap()
}

fn small_config() -> Value {
    json!({
        "name": "square",
        "fixture": fixture("h4_square_d1.5.fcidump"),
        "runs": [
            {"method": "FCI"},
            {"method": "GNM", "n": 2, "m": 1},
            {"method": "GNM", "n": 1, "m": 1, "per_graph": true},
            {"method": "KRYLOV", "mode": "POWER", "n": 3, "references": ["11110000", "11001100"]}
        ]
    })
}

#[test]
fn run_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &small_config());
    let out = dir.path().join("out");
    let status = effbasis(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );

    let mut reader = csv::Reader::from_path(out.join("square.csv")).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(&header[..4], ["system", "fixture", "method", "label"]);
    let records: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    // FCI, G(2,1), three single graphs, one Krylov row.
    assert_eq!(records.len(), 6);
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    assert_eq!(&records[0][col("label")], "FCI");
    assert_eq!(&records[1][col("label")], "G(2,1)");
    assert_eq!(&records[5][col("label")], "KRYLOV-POWER(3)");
    assert_eq!(&records[0][col("iterations")], "");
    let fci: f64 = records[0][col("energy")].parse().unwrap();
    assert!((fci + 1.9717180350559962).abs() < 1e-8);
    for r in &records {
        let e: f64 = r[col("error")].parse().unwrap();
        assert!(e >= -1e-9);
    }

    let json: Value =
        serde_json::from_str(&fs::read_to_string(out.join("square.json")).unwrap()).unwrap();
    assert_eq!(json["entries"].as_array().unwrap().len(), 6);
    assert_eq!(json["entries"][1]["detail"]["method"], "GNM");
    assert!(json["failures"].as_array().unwrap().is_empty());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &small_config());
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("out{k}"));
        let status = effbasis(&[
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--output",
            out.to_str().unwrap(),
        ]);
        assert!(status.status.success());
        outputs.push(fs::read(out.join("square.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn resources_prints_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &json!({
            "name": "res",
            "fixture": fixture("h4_linear_r1.5.fcidump"),
            "runs": [{"method": "GNM", "n": 3, "m": 3, "augmented": true}]
        }),
    );
    let out = effbasis(&[
        "resources",
        "--config",
        cfg.to_str().unwrap(),
        "--output",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("system,fixture,label"));
    assert_eq!(lines.len(), 2);
    assert!(lines[1].contains("G(3,3)+U_R"));
    assert_eq!(
        fs::read_to_string(dir.path().join("res_resources.csv")).unwrap(),
        text
    );
}

#[test]
fn invalid_config_reports_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &json!({
            "name": "bad",
            "fixture": fixture("h4_square_d1.5.fcidump"),
            "runs": [{"method": "GNM", "n": 1, "m": 2}]
        }),
    );
    let out = effbasis(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("runs[0].m"), "{err}");
}

#[test]
fn failing_fixture_exits_nonzero_but_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &json!({
            "name": "mixed",
            "fixture": fixture("h4_square_d1.5.fcidump"),
            "runs": [
                {"method": "FCI"},
                {"method": "KRYLOV", "mode": "POWER", "n": 2, "references": ["1111"]}
            ]
        }),
    );
    let out_dir = dir.path().join("out");
    let out = effbasis(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--output",
        out_dir.to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("qubits"));
    let json: Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("mixed.json")).unwrap()).unwrap();
    assert_eq!(json["failures"].as_array().unwrap().len(), 1);
}
