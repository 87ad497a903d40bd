//! End-to-end checks of the binary: dispatch, exit codes, report shape and
//! byte-level determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn corrkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corrkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_temp(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("corrkit-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn trivial_m2() -> PathBuf {
    write_temp("trivial_m2.json", r#"{ "builder": "trivial", "algebra": { "blocks": [2] } }"#)
}

fn identity_vector() -> PathBuf {
    // coordinates of 1̂ in trivial(M_2): √λ on the diagonal units, λ = 1/2
    let s = std::f64::consts::FRAC_1_SQRT_2;
    write_temp(
        "one.json",
        &format!(r#"{{ "coords": [[{s}, 0.0], [0.0, 0.0], [0.0, 0.0], [{s}, 0.0]] }}"#),
    )
}

#[test]
fn certify_reports_unit_bounds_for_identity_vector() {
    let out = corrkit(&[
        "bound",
        "certify",
        "--corr",
        trivial_m2().to_str().unwrap(),
        "--vector",
        identity_vector().to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let k_left = doc["results"]["K_left"].as_f64().unwrap();
    let k_right = doc["results"]["K_right"].as_f64().unwrap();
    assert!((k_left - 1.0).abs() < 1e-10);
    assert!((k_right - 1.0).abs() < 1e-10);
    assert_eq!(doc["schema_version"], "1");
    assert!(doc.get("wall_clock_ms").is_none());
}

#[test]
fn semidiscrete_control_passes_for_m2() {
    let algebra = write_temp("m2.json", r#"{ "blocks": [2] }"#);
    let out = corrkit(&[
        "fell",
        "semidiscrete",
        "--algebra",
        algebra.to_str().unwrap(),
        "--mult",
        "1",
        "--no-timestamp",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["results"]["contained"], true);
    assert!(doc["results"]["max_residual"].as_f64().unwrap() < 1e-6);
}

#[test]
fn reports_are_byte_identical_without_timestamps() {
    let corr = trivial_m2();
    let args = [
        "cp",
        "decompose",
        "--corr",
        corr.to_str().unwrap(),
        "--seed",
        "5",
        "--no-timestamp",
    ];
    let first = corrkit(&args);
    let second = corrkit(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn missing_file_exits_2() {
    let out = corrkit(&["algebra", "validate", "--algebra", "/definitely/not/here.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_json_exits_2_with_location() {
    let bad = write_temp("bad.json", "{ \"blocks\": [2,  ");
    let out = corrkit(&["algebra", "validate", "--algebra", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line"), "diagnostics carry a location: {err}");
}

#[test]
fn failing_check_exits_1() {
    // an explicit descriptor with one representation matrix scaled breaks
    // the homomorphism family
    let corr = write_temp(
        "broken.json",
        r#"{
          "left_algebra": { "blocks": [1] },
          "right_algebra": { "blocks": [1] },
          "dim": 1,
          "left_rep": [[[[2.0, 0.0]]]],
          "right_rep": [[[[1.0, 0.0]]]]
        }"#,
    );
    let out = corrkit(&["corr", "validate", "--corr", corr.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = doc["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["pass"] == false));
}

#[test]
fn sigma_flow_checks_state_invariance() {
    let state = write_temp(
        "state.json",
        r#"{ "algebra": { "blocks": [2] },
             "density": [[[[0.7, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.3, 0.0]]]] }"#,
    );
    let element = write_temp(
        "e12.json",
        r#"{ "algebra": { "blocks": [2] },
             "blocks": [[[[0.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]] }"#,
    );
    let out = corrkit(&[
        "sigma",
        "flow",
        "--state",
        state.to_str().unwrap(),
        "--element",
        element.to_str().unwrap(),
        "--t",
        "0.75",
        "--no-timestamp",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // σ_t(e_12) = (p/(1-p))^{it} e_12: modulus of the (1,2) entry stays 1
    let entry = &doc["results"]["flowed"][0][0][1];
    let re = entry[0].as_f64().unwrap();
    let im = entry[1].as_f64().unwrap();
    assert!((re.hypot(im) - 1.0).abs() < 1e-12);
}
