//! End-to-end tests of the `spinor-branch` binary: documented examples,
//! report schema, determinism, and exit codes.

use serde_json::Value;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinor-branch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> (Value, i32) {
    let out = run(args);
    let code = out.status.code().expect("exit code");
    let v: Value = serde_json::from_slice(&out.stdout).expect("stdout is a JSON report");
    (v, code)
}

#[test]
fn branch_discrete_example() {
    let (v, code) = report(&["branch", "--m", "3", "--rep", "ds", "--gamma", "3/2,1/2", "--sign", "-"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["components"], serde_json::json!([{"tau": ["1"]}]));
    // Schema: request/result/checks present.
    assert!(v.get("request").is_some() && v.get("checks").is_some());
}

#[test]
fn orbit_image_example() {
    let (v, code) = report(&["orbit-image", "--m", "3", "--kind", "elliptic", "--a", "2,1"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["x1"], serde_json::json!(["1", "2"]));
    assert_eq!(v["result"]["pf"], "+");
}

#[test]
fn duflo_verify_example() {
    let (v, code) = report(&[
        "duflo-verify", "--m", "3", "--rep", "ds", "--gamma", "3/2,1/2", "--sign", "-", "--bound", "5",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["matched"], Value::Bool(true));
    assert_eq!(v["checks"][0]["name"], "duflo-dictionary");
    assert_eq!(v["checks"][0]["pass"], Value::Bool(true));
}

#[test]
fn classify_reports_class_and_irreducibles() {
    let (v, code) = report(&["classify", "--m", "5", "--gamma", "3,2,1"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["class"], "Lambda0");
    assert!(v["result"]["irreducibles"].as_array().map(|a| a.len() >= 3).unwrap_or(false));
    // Half-integers come back as exact strings.
    assert_eq!(v["result"]["gamma"], serde_json::json!(["3", "2", "1"]));
}

#[test]
fn deterministic_reports() {
    let args = ["self-test", "--orbit-samples", "20", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_two() {
    // Malformed weight tuple.
    assert_eq!(run(&["classify", "--m", "3", "--gamma", "oops"]).status.code(), Some(2));
    // Missing required flag combination.
    assert_eq!(run(&["branch", "--m", "3", "--rep", "ds"]).status.code(), Some(2));
    // Unknown flag (clap itself).
    assert_eq!(run(&["classify", "--m", "3", "--nope", "1"]).status.code(), Some(2));
}

#[test]
fn csv_output_lists_checks() {
    let out = run(&["self-test", "--orbit-samples", "4", "--output", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("name,pass,residual"));
    assert!(text.contains("orbit-oracle-x,true"));
}
