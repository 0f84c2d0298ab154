use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tn-ineq")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

// a12 a21 <= a11 a22
const TWO_BY_TWO: &str = r#"{"n":2,"direction":"le","P1":[1],"Q1":[2],"P2":[2],"Q2":[1],"I1":[1],"J1":[1],"I2":[2],"J2":[2]}"#;
const SECOND_EXAMPLE: &str = r#"{"n":6,"direction":"le","P1":[1,3,4],"P2":[2,5,6],"Q1":[1,2,3],"Q2":[4,5,6],"I1":[1,3,4],"I2":[2,5,6],"J1":[3,5,6],"J2":[1,2,4]}"#;

#[test]
fn decide_exit_codes() {
    let dir = TempDir::new().unwrap();
    let holds = write(dir.path(), "k.json", TWO_BY_TWO);
    let out = run(&["decide", "--query", holds.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["verdict"]["verdict"], "holds");

    let fails = write(dir.path(), "ex2.json", SECOND_EXAMPLE);
    let out = run(&["decide", "--query", fails.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert_eq!(v["verdict"]["witness"]["S"], serde_json::json!([6, 7]));
    assert_eq!(v["principal_form"]["K1"], serde_json::json!([1, 3, 4, 9, 11, 12]));

    let out = run(&["decide", "--setops", "--query", fails.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let out = run(&["decide", "--setops", "--query", holds.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
}

#[test]
fn falsify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let q = write(dir.path(), "ex2.json", SECOND_EXAMPLE);
    let out = run(&["falsify", "--query", q.to_str().unwrap(), "--max-depth", "64"]);
    assert_eq!(code(&out), 2, "raw form exhausts without a witness");
    assert_eq!(stdout_json(&out)["status"], "exhausted");

    let out = run(&["falsify", "--query", q.to_str().unwrap(), "--principal"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout_json(&out)["witness"], serde_json::json!(["R(6,7)"]));
}

#[test]
fn family_apply_verify_pipeline() {
    let dir = TempDir::new().unwrap();
    let gk = dir.path().join("gk.json");
    let out = run(&["family", "--name", "gk", "--n", "4", "--l", "2", "--out", gk.to_str().unwrap()]);
    assert_eq!(code(&out), 0);

    let shifted = dir.path().join("shifted.json");
    let out = run(&["apply", "--expr", gk.to_str().unwrap(), "--ops", "R1,2", "--out", shifted.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let off = run(&["family", "--name", "laplace-offdiag", "--n", "4", "--i", "2", "--j", "1", "--l", "2"]);
    let a: Value = serde_json::from_str(&fs::read_to_string(&shifted).unwrap()).unwrap();
    assert_eq!(a, stdout_json(&off));

    let out = run(&["verify", "--expr", shifted.to_str().unwrap(), "--samples", "100"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["holds"], true);
}

#[test]
fn verify_reports_violations() {
    let dir = TempDir::new().unwrap();
    let q = write(dir.path(), "ex2.json", SECOND_EXAMPLE);
    let out = run(&["falsify", "--query", q.to_str().unwrap(), "--principal"]);
    let bad = write(dir.path(), "bad.json", &stdout_json(&out)["result"].to_string());
    let out = run(&["verify", "--expr", bad.to_str().unwrap(), "--samples", "20", "--nonsingular-only"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout_json(&out)["holds"], false);
}

#[test]
fn family_params_file() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "p.json", r#"{"n":3,"T":[1],"S":[2,3],"p":1}"#);
    let out = run(&["verify", "--family", "karlin-id", "--params", p.to_str().unwrap(), "--samples", "10"]);
    assert_eq!(code(&out), 0, "identities are checked for exact equality");
    assert_eq!(stdout_json(&out)["holds"], true);
    let out = run(&["family", "--name", "karlin-id", "--params", p.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["relation"], "eq0");
}

#[test]
fn oracle_agrees() {
    let out = run(&["oracle", "--n", "3", "--trials", "5"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["agree"], true);
}

#[test]
fn bad_input_is_64() {
    let dir = TempDir::new().unwrap();
    let junk = write(dir.path(), "junk.json", "{not json");
    assert_eq!(code(&run(&["decide", "--query", junk.to_str().unwrap()])), 64);
    assert_eq!(code(&run(&["decide", "--query", "/nonexistent/q.json"])), 64);
    assert_eq!(code(&run(&["family", "--name", "nope", "--n", "3"])), 64);
    assert_eq!(code(&run(&["family", "--name", "gk", "--n", "3", "--l", "9"])), 64);
    assert_eq!(code(&run(&["apply", "--expr", junk.to_str().unwrap(), "--ops", "R1,3"])), 64);
    assert_eq!(code(&run(&["frobnicate"])), 64);
    assert_eq!(code(&run(&["--help"])), 0);
}
