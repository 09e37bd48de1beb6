use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn qf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qf"))
        .args(args)
        .env_remove("QF_SEED")
        .output()
        .expect("qf runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("qf-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn meta144_is_not_stationary() {
    let out = qf(&["stationarity", "meta144"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["feasible"], false);
    assert!(v["certificate"]["multipliers"].is_array());
}

#[test]
fn heisenberg_has_eight_components() {
    let out = qf(&["components", "heisenberg:3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["count"], 8);
    assert_eq!(v["components"].as_array().unwrap().len(), 8);
}

#[test]
fn twist_state_matches_target() {
    let out = qf(&["twist", "stationarity", "--maxlen", "2", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["max_abs_error"].as_f64().unwrap() < 1e-10);
    assert_eq!(v["rows"].as_array().unwrap().len(), 1 + 4 + 16);
}

#[test]
fn keys_are_sorted() {
    let out = qf(&["components", "dihedral:4"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let top: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \"") && !l.starts_with("   "))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = top.clone();
    sorted.sort_unstable();
    assert_eq!(top, sorted);
    assert_eq!(top, ["components", "count", "group", "k"]);
}

#[test]
fn moments_are_deterministic_and_honor_qf_seed() {
    let args = ["moments", "dihedral:4", "--p", "3", "--samples", "300", "--csv"];
    let a = qf(&[&args[..], &["--seed", "17"]].concat());
    let b = qf(&[&args[..], &["--seed", "17"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout.clone()).unwrap();
    assert_eq!(text.lines().next(), Some("p,exact,estimate,stderr"));
    assert_eq!(text.lines().count(), 4);
    let env = Command::new(env!("CARGO_BIN_EXE_qf"))
        .args(args)
        .env("QF_SEED", "17")
        .output()
        .unwrap();
    assert_eq!(env.stdout, a.stdout);
    let other = qf(&[&args[..], &["--seed", "18"]].concat());
    assert_ne!(other.stdout, a.stdout);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["components", "cyclic:4"][..],
        &["frobnicate"],
        &["components", "heisenberg:4"],
        &["twist", "stationarity", "--tol", "1e-20"],
        &["latin", "1,1;2,2"],
    ] {
        assert_eq!(qf(args).status.code(), Some(2), "{args:?}");
    }
    let bad_seed = Command::new(env!("CARGO_BIN_EXE_qf"))
        .args(["gram-check"])
        .env("QF_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(bad_seed.status.code(), Some(2));
}

#[test]
fn weights_round_trip_and_corruption() {
    let report = qf(&["stationarity", "dihedral:4"]);
    let good = scratch("good.json", std::str::from_utf8(&report.stdout).unwrap());
    let ok = qf(&["stationarity", "dihedral:4", "--verify", good.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["verification"]["verified"], true);

    let corrupt = scratch("corrupt.json", r#"{"group": "dihedral:4", "weights": ["1/4", "oops"]"#);
    let bad = qf(&["stationarity", "dihedral:4", "--verify", corrupt.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(json(&bad)["verification"]["verified"], false);

    let wrong = scratch("wrong.json", r#"{"weights": [1, 0, 0]}"#);
    let out = qf(&["stationarity", "dihedral:4", "--verify", wrong.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verification"]["check"]["exact_zero"], false);
}

#[test]
fn small_commands() {
    let latin = json(&qf(&["latin", "cyclic:4"]));
    assert_eq!(latin["count"], 24);
    let growth = json(&qf(&["growth", "integers", "--radius", "4"]));
    assert_eq!(growth["volumes"], serde_json::json!([1, 3, 5, 7, 9]));
    let gram = qf(&["gram-check", "--p", "2", "--r", "2", "--seed", "3"]);
    assert_eq!(gram.status.code(), Some(0));
    assert!(json(&gram)["abs_diff"].as_f64().unwrap() < 1e-10);
    let faithful = qf(&["faithfulness", "meta144"]);
    assert_eq!(faithful.status.code(), Some(0));
    assert_eq!(json(&faithful)["faithful"], true);
    let info = json(&qf(&["group", "info", "dihedral:4"]));
    assert_eq!(info["order"], 8);
    assert_eq!(info["irreps"].as_array().unwrap().len(), 5);
    let rel = qf(&["twist", "relations", "--theta", "0.4,1.2"]);
    assert_eq!(rel.status.code(), Some(0));
    assert!(json(&rel)["max_residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn reproduce_all_is_byte_identical_and_flags_corrupt_weights() {
    let corrupt = scratch("repro.json", r#"{"group": "dihedral:4", "weights": "none"}"#);
    let args = ["reproduce-all", "--json", "--seed", "5", "--weights", corrupt.to_str().unwrap()];
    let a = qf(&args);
    let b = qf(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(1));
    let v = json(&a);
    let criteria = v["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 10);
    assert!(criteria.iter().all(|c| c["passed"] == true));
    assert_eq!(v["weights_file"]["verified"], false);
}
