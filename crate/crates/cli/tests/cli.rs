use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_whittaker")).args(args).output().expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn error_kind(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(2), "{args:?}");
    let v: Value = serde_json::from_slice(&out.stdout).expect("JSON error object");
    v["error"]["kind"].as_str().expect("kind").to_string()
}

#[test]
fn chain_glsame_critical_numbers() {
    let v = json_ok(&["chain", "--example", "glsame"]);
    assert_eq!(v["critical"], serde_json::json!(["1/4", "3/4"]));
    assert!(v["certificates"].as_object().unwrap().values().all(|b| b == true));
}

#[test]
fn chain_from_json_input_matches_builtin() {
    let input = r#"{"S": [1,-1,1,-1],
        "f": [[0,0,0,0],[1,0,0,0],[0,0,0,0],[0,0,1,0]],
        "S_tilde": [3,1,-1,-3],
        "f_tilde": [[0,0,0,0],[1,0,0,0],[0,0,0,0],[0,0,1,0]]}"#;
    assert_eq!(json_ok(&["chain", "--input", input]), json_ok(&["chain", "--example", "glsame"]));
}

#[test]
fn glmain_witness() {
    let v = json_ok(&["glmain", "--lam", "3,1", "--mu", "2,2"]);
    assert_eq!(v["S"], serde_json::json!([2, 0, -2, 0]));
    assert!(v["conjugators"].is_array());
    assert!(v["checks"].as_object().unwrap().values().all(|b| b == true));
    let two = json_ok(&["glmain", "--two-blocks", "2,1,1"]);
    assert_eq!(two["S"], v["S"]);
}

#[test]
fn orbit_order() {
    assert_eq!(json_ok(&["orbit-order", "--mu", "3,2", "--lam", "4,1"]), serde_json::json!({"leq": true}));
    assert_eq!(json_ok(&["orbit-order", "--mu", "4,1", "--lam", "3,2"]), serde_json::json!({"leq": false}));
}

#[test]
fn small_commands() {
    let v = json_ok(&["jordan-type", "--matrix", "[[0,0,0],[1,0,0],[0,0,0]]"]);
    assert_eq!(v["partition"], serde_json::json!([2, 1]));
    let v = json_ok(&["critical", "--s", "1,-1,1,-1", "--z", "2,2,-2,-2"]);
    assert_eq!(v["critical"], serde_json::json!(["1/4", "3/4"]));
    let v = json_ok(&["deligne", "--lam", "2", "--k", "2"]);
    assert_eq!(v["space"]["basis"].as_array().unwrap().len(), 1);
    let v = json_ok(&["heisenberg", "--lam", "3,1", "--z", "1,1,1,0"]);
    assert_eq!(v["all_checks_pass"], true);
    let v = json_ok(&["principal", "--s", "1,-1,0", "--f", "[[0,0,0],[1,0,0],[0,0,0]]"]);
    assert_eq!(v["all_pass"], true);
    let v = json_ok(&["mirabolic", "--eta", "1,2"]);
    assert_eq!(v["all_pass"], true);
}

#[test]
fn domain_errors_exit_2() {
    assert_eq!(error_kind(&["orbit-order", "--mu", "1,2", "--lam", "3"]), "InvalidPartition");
    assert_eq!(error_kind(&["orbit-order", "--mu", "3", "--lam", "2,1,1"]), "UnequalTotals");
    assert_eq!(error_kind(&["glmain", "--lam", "2,2", "--mu", "3,1"]), "NotDominated");
    assert_eq!(error_kind(&["jordan-type", "--matrix", "[[1]]"]), "NotNilpotent");
    assert_eq!(error_kind(&["mirabolic", "--eta", "3"]), "CompositionTooShort");
    assert_eq!(error_kind(&["principal", "--s", "1,1,0", "--f", "[[0,0,0],[1,0,0],[0,0,0]]"]), "InvalidPair");
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        &[][..],
        &["bogus"],
        &["orbit-order", "--mu", "3,x", "--lam", "3"],
        &["chain"],
        &["chain", "--example", "nope"],
        &["jordan-type", "--matrix", "/nonexistent/m.json"],
        &["glmain", "--two-blocks", "1,1"],
    ] {
        assert_eq!(run(args).status.code(), Some(64), "{args:?}");
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_examples_pass() {
    let v = json_ok(&["verify-paper-examples"]);
    assert_eq!(v["ok"], true);
    assert_eq!(v["examples"].as_array().unwrap().len(), 3);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["chain", "--example", "glsmall"][..],
        &["glmain", "--lam", "3,2,1", "--mu", "2,2,1,1"],
        &["verify-paper-examples"],
        &["mirabolic", "--eta", "2,1"],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("whittaker-cli-test-{}.json", std::process::id()));
    let out = run(&["orbit-order", "--mu", "2,2", "--lam", "3,1", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(v, serde_json::json!({"leq": true}));
}

#[test]
fn sweep_prints_a_table() {
    let out = run(&["--sweep", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.ends_with("PASS") || l.ends_with("FAIL")).count(), 10);
    assert!(text.contains("of 10 suites passed"));
    // the mirabolic suite includes compositions whose last part is not largest
    assert_eq!(out.status.code(), Some(1));
}
