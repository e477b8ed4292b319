use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn thinsurf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thinsurf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = thinsurf(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn t1(dir: &Path) -> String {
    let out = thinsurf(&["toy-config", "--name", "T1"]);
    assert!(out.status.success());
    write(dir, "t1.json", &String::from_utf8(out.stdout).unwrap())
}

#[test]
fn form_commands() {
    let v = json_ok(&["form", "invariants", "--coeffs", "-1,1,1,35,5"]);
    assert_eq!(v["rank"], 5);
    assert_eq!(v["discriminant"], "-7");
    assert_eq!(v["hasse"]["2"], -1);
    let v = json_ok(&["form", "equiv", "--lhs", "1,1", "--rhs", "2,2"]);
    assert_eq!(v["equivalent"], true);
    let v = json_ok(&["form", "isotropic", "--coeffs", "-1,1,1,1", "--bound", "5"]);
    assert_eq!(v["isotropic"], true);
    assert!(v["witness"].is_array());
    let v = json_ok(&["subchain", "--coeffs", "-1,1,1,35,5"]);
    assert_eq!(v["steps"].as_array().unwrap().len(), 1);
}

#[test]
fn integers_are_not_truncated() {
    let big = "123456789012345678901234567";
    let v = json_ok(&["form", "invariants", "--coeffs", &format!("-1,1,{big}")]);
    assert_eq!(v["rank"], 3);
    assert!(v["discriminant"].is_string());
}

#[test]
fn montesinos_and_replacement() {
    let v = json_ok(&["montesinos", "--S", "5", "--a", "3"]);
    assert_eq!(v["selection"]["indices"], serde_json::json!([0, 1, 2, 4]));
    let v = json_ok(&["prime-replace", "--S", "15", "--a", "7"]);
    assert_eq!(v["replacement"]["aPrime"], "67");
    assert_eq!(v["equivalence"]["equivalent"], true);
    let out = thinsurf(&["montesinos", "--S", "9", "--a", "5"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("squarefree"));
}

#[test]
fn matrix_commands() {
    let dir = tempfile::tempdir().unwrap();
    let out = thinsurf(&["matrix", "eichler", "--form", "-1,1,1,1", "--u", "1,1,0,0", "--v", "0,0,1,0"]);
    assert!(out.status.success());
    let m = write(dir.path(), "m.json", &String::from_utf8(out.stdout).unwrap());
    let v = json_ok(&["matrix", "check", "--form", "-1,1,1,1", "--file", &m]);
    assert_eq!(v["preservesForm"], true);
    assert_eq!(v["soPlus"], true);
    assert_eq!(v["unipotent"], true);
    let v = json_ok(&["matrix", "corner", "--file", &m]);
    let rows = v["entries"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[4][4], "1/1");
    let out = thinsurf(&["matrix", "eichler", "--form", "-1,1,1,1", "--u", "1,0,0,0", "--v", "0,0,1,0"]);
    assert!(!out.status.success());
}

#[test]
fn word_and_certificate_commands() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = t1(dir.path());
    let w = write(
        dir.path(),
        "w.json",
        r#"[{"kind":"base","letters":[1]},{"kind":"stable","cusp":0,"power":1},{"kind":"base","letters":[2]},{"kind":"stable","cusp":1,"power":-1}]"#,
    );
    let v = json_ok(&["word", "identity", "--config", &cfg, "--word", &w]);
    assert_eq!(v["identity"], false);
    let v = json_ok(&["certify", "--config", &cfg, "--word", &w, "--D", "6.0", "--precision", "256"]);
    assert_eq!(v["certificate"]["pass"], true);
    assert_eq!(v["certificate"]["segmentCount"], 5);
    assert_eq!(v["powers"][0]["power"], 321);
    // t0 a t0^-1 reduces to a single base syllable
    let w2 = write(
        dir.path(),
        "w2.json",
        r#"[{"kind":"stable","cusp":0,"power":1},{"kind":"base","letters":[1]},{"kind":"stable","cusp":0,"power":-1}]"#,
    );
    let v = json_ok(&["word", "reduce", "--config", &cfg, "--word", &w2]);
    assert_eq!(v["text"], "[1]");
    let v = json_ok(&["word", "sweep", "--config", &cfg, "--L", "3", "--E", "1", "--B", "1"]);
    assert_eq!(v["sweep"]["certificateFailures"], 0);
    assert!(v["sweep"]["runtimeSeconds"].is_null());
    let v = json_ok(&["horoballs", "--config", &cfg, "--D", "6.0"]);
    assert_eq!(v["balls"][0]["level"], "1/32");
}

#[test]
fn density_command() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = t1(dir.path());
    let v = json_ok(&["density", "--config", &cfg, "--base-only"]);
    assert_eq!(v["hyperplaneInvariantVectors"], serde_json::json!([["0/1", "0/1", "0/1", "0/1", "1/1"]]));
    assert_eq!(v["containsCornerBlock"], true);
    let v = json_ok(&["density", "--config", &cfg]);
    assert_eq!(v["hyperplaneInvariantVectors"], serde_json::json!([]));
}

#[test]
fn pipeline_run_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = thinsurf(&["pipeline", "run", "--S", "5", "--a", "3", "--D", "6.0", "--L", "3", "--out", p.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8_lossy(&out.stderr).contains("runtime"));
    }
    let (x, y) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert!(!x.is_empty());
    assert_eq!(x, y);
    let v: Value = serde_json::from_slice(&x).unwrap();
    assert_eq!(v["certification"]["sweep"]["certificateFailures"], 0);
}

#[test]
fn pipeline_errors_carry_stage() {
    let out = thinsurf(&["pipeline", "run", "--S", "9", "--a", "5"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("stage validate"));
    let out = thinsurf(&["pipeline", "toy", "--name", "T9"]);
    assert!(!out.status.success());
    let out = thinsurf(&["pipeline", "run", "--coeffs", "-1,1,1,1,1", "--S", "5", "--a", "3"]);
    assert!(!out.status.success());
}

#[test]
fn pipeline_toy() {
    let v = json_ok(&["pipeline", "toy", "--name", "T1", "--L", "3"]);
    assert_eq!(v["powers"][1]["power"], 321);
    assert_eq!(v["density"]["hyperplaneInvariantVectors"], serde_json::json!([]));
    assert_eq!(v["sweep"]["certificateFailures"], 0);
}
