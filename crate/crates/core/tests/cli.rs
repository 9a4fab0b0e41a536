use std::process::{Command, Output};

use krphase::invariants::{KRClassJson, KRClassVector};

fn krphase(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_krphase"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn compute_reports_class_and_oracle() {
    let out = krphase(&["compute", "--d", "2", "--m", "-1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["class"]["strong"], -1);
    assert_eq!(v["class"]["p"], 1);
    assert_eq!(v["closed_form"]["agrees"], true);
    assert_eq!(v["oracle"]["degree"].as_i64().unwrap().abs(), 1);
    assert!(v["discrepancies"].as_array().unwrap().is_empty());
}

#[test]
fn class_json_round_trips() {
    let out = krphase(&["compute", "--d", "3", "--m", "-0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let json: KRClassJson = serde_json::from_value(v["class"].clone()).unwrap();
    let class = KRClassVector::from_json(&json).unwrap();
    assert_eq!(class.strong(), 2);
    assert_eq!(serde_json::to_value(class.to_json()).unwrap(), v["class"]);
}

#[test]
fn stacked_compute_skips_oracle() {
    let out = krphase(&["compute", "--d", "4", "--m", "0.5", "--axes", "2,4", "--extra-b", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!(v["oracle"].is_null());
    assert_eq!(v["class"]["coefficient"], "Z2");
}

#[test]
fn gap_closed_exits_2() {
    for args in [
        &["compute", "--d", "2", "--m", "0"][..],
        &["compute", "--d", "3", "--m", "-3"][..],
        &["compute", "--d", "4", "--m", "1", "--axes", "1,3,4"][..],
    ] {
        let out = krphase(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("gap closed"));
    }
}

#[test]
fn usage_errors_exit_1() {
    for args in [
        &["compute", "--d", "x", "--m", "0.5"][..],
        &["compute", "--m", "0.5"][..],
        &["compute", "--d", "2", "--m", "0.5", "--axes", "3"][..],
        &["compute", "--d", "2", "--m", "0.5", "--extra-b", "3"][..],
        &["frobnicate"][..],
    ] {
        assert_eq!(krphase(args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn help_exits_0() {
    let out = krphase(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("compute"));
}

#[test]
fn gap_reports_closing_set() {
    let out = krphase(&["gap", "--d", "2", "--m", "0.5", "--grid", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["gap"], "1");
    assert_eq!(v["closing_set"], serde_json::json!([-2, 0, 2]));
    assert_eq!(v["in_closing_set"], false);

    let out = krphase(&["gap", "--d", "2", "--m", "0", "--grid", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["gap"], "0");
    assert_eq!(v["in_closing_set"], true);
}

#[test]
fn classify_with_cartan_label() {
    let out = krphase(&["classify", "--a", "0", "--b", "2", "--cartan"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["j"], 3);
    assert_eq!(v["cartan_label"], "DIII");

    let out = krphase(&["classify", "--a", "1", "--b", "0"]);
    let v = stdout_json(&out);
    assert!(v.get("cartan_label").is_none());
}

#[test]
fn check_passes_and_tiny_tol_fails() {
    let out = krphase(&["check", "--max-d", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 7);

    let out = krphase(&["check", "--max-d", "2", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("first failing suite: bloch"));
}

#[test]
fn table_format_is_plain_text() {
    let out = krphase(&["compute", "--d", "1", "--m", "-2", "--format", "table"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(serde_json::from_str::<serde_json::Value>(&text).is_err());
    assert!(text.contains("closed form agrees: true"));
}
