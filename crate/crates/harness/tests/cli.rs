use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn spinbath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinbath"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn sidecar(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path.with_extension("json")).unwrap()).unwrap()
}

#[test]
fn fig1_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested/fig1.csv");
    let status = spinbath(&["fig1", "--n", "6", "--t-steps", "11", "--out", out.to_str().unwrap()]);
    assert_eq!(
        status.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["kt", "f_av_s0", "f_av_t0", "p_s0", "p_t0"]);
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[0][1], "1");
    assert_eq!(rows[0][2], "1");
    let meta = sidecar(&out);
    assert_eq!(meta["schema_version"], 1);
    assert_eq!(meta["command"], "fig1");
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(meta["config"]["n"], 6);
    assert_eq!(meta["config"]["kA"], -1.0);
    // Small baths revive, so the ordering is only a summary field here.
    assert!(meta["results"]["triplet_dominates"].is_boolean());
}

#[test]
fn csv_goes_to_stdout_without_out() {
    let output = spinbath(&["fig1", "--n", "2", "--t-steps", "3"]);
    assert_eq!(output.status.code(), Some(0));
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.starts_with("kt,f_av_s0,f_av_t0,p_s0,p_t0\n0,1,1,"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(&config, r#"{"n": 4, "kA": 0.25, "t_max": 1.0, "t_steps": 5}"#).unwrap();
    let out = dir.path().join("fig1.csv");
    let status = spinbath(&[
        "fig1",
        "--config",
        config.to_str().unwrap(),
        "--n",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(status.status.code(), Some(0));
    let meta = sidecar(&out);
    assert_eq!(meta["config"]["n"], 3);
    assert_eq!(meta["config"]["kA"], 0.25);
    assert_eq!(read_csv(&out).1.last().unwrap()[0], "1");
}

#[test]
fn configuration_errors_exit_with_two() {
    assert_eq!(spinbath(&["fig1", "--t-steps", "1"]).status.code(), Some(2));
    assert_eq!(spinbath(&["fig1", "--shared", "bogus"]).status.code(), Some(2));
    assert_eq!(spinbath(&["fig1", "--r", "-0.5"]).status.code(), Some(2));
    assert_eq!(spinbath(&["fig1", "--n", "0"]).status.code(), Some(2));
    assert_eq!(spinbath(&["fig1", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(
        spinbath(&["fig1", "--config", "/nonexistent/run.json"]).status.code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    std::fs::write(&config, r#"{"spins": 4}"#).unwrap();
    let output = spinbath(&["fig1", "--config", config.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("bad.json"));
}

#[test]
fn empty_sweep_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let status = spinbath(&["sweep", "--deltas", "", "--out", out.to_str().unwrap()]);
    assert_eq!(status.status.code(), Some(0));
    assert_eq!(
        std::fs::read_to_string(&out).unwrap(),
        "delta,r,label,mode,kt,f_av,fidelity,probability\n"
    );
    assert_eq!(sidecar(&out)["results"]["fits"], Value::Array(vec![]));
}

#[test]
fn sweep_intercepts_follow_the_basis_parameter() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let args = [
        "sweep",
        "--deltas",
        "-1",
        "--rs",
        "0,0.5,1",
        "--t-max",
        "0.05",
        "--t-steps",
        "6",
        "--out",
        out.to_str().unwrap(),
    ];
    assert_eq!(spinbath(&args).status.code(), Some(0));
    let (header, rows) = read_csv(&out);
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    assert_eq!(rows.len(), 3 * 4 * 6);
    for row in rows.iter().filter(|r| r[col("kt")] == "0") {
        let r: f64 = row[col("r")].parse().unwrap();
        let expected = 0.5 + ((1.0 + r).powi(2) + 2.0 * r) / (6.0 * (1.0 + r * r));
        let f: f64 = row[col("f_av")].parse().unwrap();
        assert!((f - expected).abs() < 1e-10, "{row:?}");
    }
}

#[test]
fn sweep_singlet_rate_scales_with_one_minus_delta() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let args = [
        "sweep",
        "--deltas",
        "-1,0,1",
        "--labels",
        "s0",
        "--t-max",
        "0.05",
        "--t-steps",
        "11",
        "--out",
        out.to_str().unwrap(),
    ];
    assert_eq!(spinbath(&args).status.code(), Some(0));
    let fits = sidecar(&out)["results"]["fits"].as_array().unwrap().clone();
    let coeff: Vec<f64> = fits.iter().map(|f| f["coefficient"].as_f64().unwrap()).collect();
    assert!((coeff[0] / 2.0 - coeff[1]).abs() / coeff[1] < 0.02);
    assert!(coeff[2].abs() < 1e-8);
}

#[test]
fn fig2_reports_offsets_for_polarized_baths() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig2.csv");
    let status = spinbath(&["fig2", "--n", "8", "--t-steps", "31", "--out", out.to_str().unwrap()]);
    assert_eq!(status.status.code(), Some(0));
    let (header, rows) = read_csv(&out);
    assert_eq!(
        header,
        ["kt", "f_parallel", "f_perpendicular", "p_parallel", "p_perpendicular"]
    );
    assert_eq!(&rows[0][1..3], ["1", "1"]);
    let meta = sidecar(&out);
    assert_eq!(meta["config"]["bath"], "polarized");
    assert!(meta["results"]["max_offset_norm"].as_f64().unwrap() > 1e-3);
}

#[test]
fn validate_passes_and_detects_an_injected_fault() {
    let dir = tempfile::tempdir().unwrap();
    let clean = dir.path().join("clean.json");
    let output = spinbath(&["validate", "--out", clean.to_str().unwrap()]);
    assert_eq!(
        output.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let report: Value = serde_json::from_slice(&std::fs::read(&clean).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    let oracle = report["suites"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["name"] == "oracle-agreement")
        .unwrap();
    for check in oracle["checks"].as_array().unwrap() {
        assert!(check["residual"].as_f64().unwrap() < 1e-10);
    }

    let faulty = dir.path().join("faulty.json");
    let output = spinbath(&[
        "validate",
        "--inject-fault",
        "flip-pair-sign",
        "--out",
        faulty.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&std::fs::read(&faulty).unwrap()).unwrap();
    let dark = report["suites"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["name"] == "dark-subspace")
        .unwrap();
    assert_eq!(dark["passed"], false);
}
