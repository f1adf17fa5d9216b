use std::f64::consts::PI;
use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn nashdual(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nashdual"))
        .args(args)
        .env_remove("NASHDUAL_GRID_CELLS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

#[test]
fn constants_dim3() {
    let v = json(&nashdual(&["constants", "--dim", "3"]));
    assert!((num(&v, "mu1") - 20.1907).abs() < 1e-4);
    assert!(num(&v, "K") >= num(&v, "L"));
    assert!(v["discrepancy_notes"].is_array());
}

#[test]
fn constants_weighted_lists_both_roots() {
    let v = json(&nashdual(&["constants", "--dim", "3", "--p", "2"]));
    assert!((num(&v, "lambda0_printed") - 1.969866462877).abs() < 1e-9);
    assert!(num(&v, "lambda0_rederived") > 3.0);
    assert_eq!(v["variant"], "rederived");
}

#[test]
fn constants_dim0_is_usage_error() {
    let out = nashdual(&["constants", "--dim", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unsupported_weight_is_input_error() {
    let out = nashdual(&["constants", "--dim", "3", "--p", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn infconv_gaussian_record() {
    let v = json(&nashdual(&["infconv", "--dim", "3", "--family", "gaussian", "--sigma", "1"]));
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(|s| s.as_str()).collect();
    assert_eq!(
        keys,
        ["n", "p", "c_star", "g_value", "a_value", "free_radius", "mass_balance_err", "kkt_residual", "phi_integral"]
    );
    assert!(num(&v, "g_value") > 0.0);
    assert!(num(&v, "kkt_residual") < 1e-8);
}

#[test]
fn infconv_needs_exactly_one_source() {
    assert_eq!(nashdual(&["infconv", "--dim", "3"]).status.code(), Some(2));
    let out = nashdual(&["infconv", "--dim", "3", "--family", "bump", "--csv", "x.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn optimizer_round_trip_through_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("opt.csv");
    let p = path.to_str().unwrap();
    assert!(nashdual(&["optimizer", "--dim", "3", "--out", p]).status.success());
    let meta: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("opt.json")).unwrap()).unwrap();
    let mean = num(&meta, "mean_g");
    let v = json(&nashdual(&["infconv", "--dim", "3", "--csv", p]));
    assert!((num(&v, "c_star") - mean).abs() < 1e-4, "{} vs {mean}", num(&v, "c_star"));
}

#[test]
fn malformed_csv_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "r,value\n0,1\n0.5,oops\n1,0\n").unwrap();
    let out = nashdual(&["infconv", "--dim", "3", "--csv", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn signed_profile_dispatch() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("signed.csv");
    fs::write(&path, "r,value\n0,1\n0.5,-1\n1,0\n").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(nashdual(&["infconv", "--dim", "3", "--csv", p]).status.code(), Some(2));
    let out = nashdual(&["infconv", "--dim", "3", "--csv", p, "--allow-signed"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("projected"));
}

#[test]
fn optimizer_dim1_closed_form() {
    let out = nashdual(&["optimizer", "--dim", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,value"));
    let mut rows = 0;
    for line in lines {
        let (r, v) = line.split_once(',').unwrap();
        let (r, v): (f64, f64) = (r.parse().unwrap(), v.parse().unwrap());
        let want = if r <= 1.0 { 0.5 * PI * PI * (1.0 + (PI * r).cos()) } else { 0.0 };
        assert!((v - want).abs() < 1e-8, "r={r}: {v} vs {want}");
        rows += 1;
    }
    assert!(rows > 1000);
}

#[test]
fn weighted_optimizer_metadata() {
    let v = json(&nashdual(&["optimizer", "--dim", "3", "--p", "2", "--variant", "auto", "--format", "json"]));
    assert_eq!(v["variant"], "rederived");
    assert!(num(&v, "el_residual_rederived") < 1e-3);
    assert!(num(&v, "el_residual_printed") > 10.0 * num(&v, "el_residual_rederived"));
}

#[test]
fn solver_failure_exit_code() {
    // far too coarse for the weighted Euler-Lagrange tripwire
    let out = nashdual(&["optimizer", "--dim", "3", "--p", "2", "--cells", "16"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn grid_cells_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_nashdual"))
        .args(["optimizer", "--dim", "3", "--format", "json"])
        .env("NASHDUAL_GRID_CELLS", "600")
        .output()
        .unwrap();
    assert_eq!(num(&json(&out), "cells"), 600.0);
}

#[test]
fn verify_passes_and_is_byte_stable() {
    let a = nashdual(&["verify", "--dims", "1,3,4"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v["summary"]["failures"].as_array().unwrap().is_empty());
    assert!(v["meta"]["version"].is_string());
    let b = nashdual(&["verify", "--dims", "1,3,4"]);
    assert_eq!(a.stdout, b.stdout);
}
