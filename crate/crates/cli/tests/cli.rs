use std::path::Path;
use std::process::{Command, Output};

fn tcl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tcl"))
        .args(args)
        .env_remove("TCL_SEED")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn classify_reports_a_convex_point() {
    let o = tcl(&["classify", "--p", "1", "--q", "-1/2", "--s", "2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["convexity"]["status"], "proven_convex");
}

#[test]
fn bad_exponent_is_a_usage_error() {
    let o = tcl(&["classify", "--p", "one", "--q", "1", "--s", "1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn zero_trials_is_rejected() {
    let o = tcl(&["--trials", "0", "probe", "--p", "1", "--q", "1", "--s", "1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn unknown_counterexample_lists_valid_names() {
    let o = tcl(&["counterexample", "bogus"]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("valid names"), "{err}");
    for name in ["lemma33-neg", "lemma33-mid", "homogeneity", "dilation"] {
        assert!(err.contains(name), "{name} missing from {err}");
    }
}

#[test]
fn malformed_grid_is_a_usage_error() {
    let o = tcl(&["scan", "--p-grid", "1:2", "--q-grid", "1", "--s-grid", "1"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing").join("out.json");
    let o = tcl(&["--out", out.to_str().unwrap(), "classify", "--p", "1", "--q", "1", "--s", "1"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn concave_scan_finds_nothing() {
    let o = tcl(&[
        "--trials", "40", "--format", "csv", "scan", "--p-grid", "1/4,1/2", "--q-grid", "1/4,1/2", "--s-grid", "1/2,1",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    let header: Vec<&str> = rows[0].split(',').collect();
    let col = header.iter().position(|&h| h == "violated_concave").unwrap();
    assert_eq!(rows.len(), 1 + 8);
    for row in &rows[1..] {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[col], "false", "{row}");
        assert_eq!(fields[5], "proven_concave", "{row}");
    }
}

#[test]
fn dpi_in_known_region_has_no_violations() {
    let o = tcl(&["--trials", "100", "dpi", "--alpha-grid", "1.5", "--z-grid", "0.75,1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for row in v["rows"].as_array().unwrap() {
        assert!(row["known_region"].is_string());
        assert_eq!(row["violations"], 0);
    }
}

#[test]
fn env_seed_overrides_flag_and_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("probe.json");
    let o = Command::new(env!("CARGO_BIN_EXE_tcl"))
        .args(["--seed", "5", "--trials", "20", "--out", out.to_str().unwrap()])
        .args(["probe", "--p", "1", "--q", "1/2", "--s", "1"])
        .env("TCL_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let manifest = read_json(&dir.path().join("probe.json.manifest.json"));
    assert_eq!(manifest["seed"], 77);
    assert_eq!(manifest["command"], "probe");
}

#[test]
fn replay_reproduces_output_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    let o = tcl(&[
        "--seed", "3", "--trials", "30", "--format", "csv", "--out", first.to_str().unwrap(),
        "probe", "--p", "1/2", "--q", "1/2", "--s", "1", "--direction", "concave",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let manifest = dir.path().join("a.csv.manifest.json");
    let o = tcl(&["--out", second.to_str().unwrap(), "replay", manifest.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
    assert!(dir.path().join("b.csv.manifest.json").exists());
}

#[test]
fn counterexample_margin_is_negative() {
    let o = tcl(&["counterexample", "lemma33-mid", "--r", "0.5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["margin"].as_f64().unwrap() < 0.0, "{v}");
}
