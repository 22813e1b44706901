use std::process::{Command, Output};

use qpi_core::report::Report;

fn qpi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpi")).args(args).env_remove("QPI_DIGITS").output().expect("spawn qpi")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn list_q_main_has_seven_rows() {
    let o = qpi(&["list", "--family", "q-main"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 7);
}

#[test]
fn list_json_is_parseable() {
    let o = qpi(&["list", "--json"]);
    let rows: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(rows.as_array().unwrap().len() > 20);
}

#[test]
fn unknown_family_is_usage_error() {
    assert_eq!(qpi(&["list", "--family", "nosuch"]).status.code(), Some(2));
}

#[test]
fn unknown_flag_is_usage_error() {
    assert_eq!(qpi(&["verify", "--bogus"]).status.code(), Some(2));
}

#[test]
fn verify_single_point_json() {
    let o = qpi(&["verify", "sun", "--q", "1/2", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = Report::from_json(&stdout(&o)).unwrap();
    assert_eq!(doc.results.len(), 1);
    assert!(doc.results[0].pass);
    assert_eq!(doc.results[0].point["q"], "0.5");
}

#[test]
fn q_outside_unit_interval_rejected() {
    assert_eq!(qpi(&["verify", "sun", "--q", "2"]).status.code(), Some(2));
    assert_eq!(qpi(&["verify", "sun", "--q", "0"]).status.code(), Some(2));
}

#[test]
fn unknown_identity_rejected() {
    assert_eq!(qpi(&["verify", "no-such-id"]).status.code(), Some(2));
}

#[test]
fn tolerance_below_precision_floor_rejected() {
    assert_eq!(qpi(&["verify", "sun", "--digits", "30", "--tol", "1e-25"]).status.code(), Some(2));
}

#[test]
fn digits_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_qpi"))
        .args(["verify", "thm-c", "--q", "1/4", "--tol", "1e-20", "--json"])
        .env("QPI_DIGITS", "35")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(Report::from_json(&stdout(&o)).unwrap().config.digits, 35);
}

#[test]
fn eval_prints_value() {
    let o = qpi(&["eval", "thm-c", "--q", "1/2", "--side", "rhs", "--digits", "30"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("value"));
}

#[test]
fn wrong_exponent_is_flagged() {
    let o = qpi(&["limit", "sun", "--exponent", "7"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("ZERO"));
}

#[test]
fn thm_e_limit_without_normalization() {
    let o = qpi(&["limit", "thm-e", "--exponent", "0", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let value: f64 = v["value"].as_str().unwrap().parse().unwrap();
    let pi = std::f64::consts::PI;
    assert!((value - pi * pi / 8.0).abs() < 1e-12);
    assert_eq!(v["flag"], "stable");
}

#[test]
fn report_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.json"), dir.path().join("b.json")];
    for p in &paths {
        let o = qpi(&["report", "--no-limits", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text: Vec<String> = paths.iter().map(|p| std::fs::read_to_string(p).unwrap()).collect();
    let docs: Vec<Report> = text.iter().map(|t| Report::from_json(t).unwrap()).collect();
    assert_eq!(docs[0].without_timing(), docs[1].without_timing());
    assert_eq!(docs[0].to_json(), text[0]);
    // flagged entries carry pass = false but do not fail the run
    assert!(docs[0].results.iter().all(|r| r.pass || r.status == "flagged"));
    assert!(docs[0].limits.is_empty());
}

#[test]
fn unwritable_report_path_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing").join("r.json");
    assert_eq!(qpi(&["report", "--out", bad.to_str().unwrap()]).status.code(), Some(2));
}
