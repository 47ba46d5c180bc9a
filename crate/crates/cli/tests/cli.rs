//! End-to-end runs of the binary: exit codes, outputs and round trips.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wandering")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value_of(text: &str, name: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{name} = ")))
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| panic!("{name} missing in {text}"))
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn eval_reference_point() {
    let o = run(&["eval", "--alpha", "-16", "--k", "6", "--d", "1,1,4,6"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(value_of(&text, "B_2") <= 0.02795);
    assert!(value_of(&text, "B_1") < value_of(&text, "B_2"));
}

#[test]
fn eval_is_homogeneous_in_d() {
    let a = stdout(&run(&["eval", "--d", "1,1,1,1"]));
    let b = stdout(&run(&["eval", "--d", "7,7,7,7"]));
    assert_eq!(value_of(&a, "B_1"), value_of(&b, "B_1"));
}

#[test]
fn eval_with_z3_reports_minimiser() {
    let text = stdout(&run(&["eval", "--d", "1,4,6", "--z3", "-2e13"]));
    assert!((value_of(&text, "Z_1") - 6.1296).abs() < 1e-3);
    assert!(value_of(&text, "B_0") < 0.216);
}

#[test]
fn classical_norms_are_errors() {
    for alpha in ["0", "1"] {
        let o = run(&["eval", "--alpha", alpha]);
        assert_eq!(code(&o), 1);
        assert!(String::from_utf8_lossy(&o.stderr).contains("singular"));
    }
}

#[test]
fn emitted_weights_are_exact() {
    let rows = csv_rows(&stdout(&run(&["eval", "--emit-weights"])));
    assert_eq!(rows.len(), 12);
    assert_eq!(rows[0], ["6", "1/33232930569601"]);
}

#[test]
fn pipeline_certificate_round_trips_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.json");
    let second = dir.path().join("b.json");
    for path in [&first, &second] {
        let o = run(&["pipeline", "--alpha", "-16", "--k", "6", "--out", path.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
    assert_eq!(read_json(&first)["verdict"], "pass");

    let check = run(&["certify", "--check", first.to_str().unwrap()]);
    assert_eq!(code(&check), 0);
    let report: Value = serde_json::from_str(&stdout(&check)).unwrap();
    assert_eq!(report["consistent"], true);

    let mut tampered = read_json(&first);
    tampered["weights_used"]["7"] = Value::String("1".into());
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, tampered.to_string()).unwrap();
    assert_eq!(code(&run(&["certify", "--check", bad.to_str().unwrap()])), 2);
}

#[test]
fn interval_certificate_rechecks() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let o = run(&["pipeline", "--alpha", "-33/2", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_json(&path)["regime"], "interval");
    assert_eq!(code(&run(&["certify", "--check", path.to_str().unwrap()])), 0);
}

#[test]
fn bergman_override_passes() {
    for k in ["6", "10"] {
        let o = run(&["pipeline", "--alpha", "-16", "--override-base", "-1", "--k", k]);
        assert_eq!(code(&o), 0, "k={k}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn mild_exponent_finds_nothing() {
    let o = run(&["pipeline", "--alpha", "-0.5", "--points", "5"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn recovered_pair_certifies() {
    let dir = tempfile::tempdir().unwrap();
    let pair = dir.path().join("pair.json");
    let o = run(&["recover", "--d", "1,4,6", "--z3", "-2e13", "--pair-out", pair.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&stdout(&o));
    assert!(rows.iter().any(|r| r[0] == "A_15"));
    let cert = run(&["certify", "--pair", pair.to_str().unwrap()]);
    assert_eq!(code(&cert), 0);
    let v: Value = serde_json::from_str(&stdout(&cert)).unwrap();
    assert_eq!(v["core_only"], true);
}

#[test]
fn search_from_toml_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("search.toml");
    std::fs::write(&config, "alpha = [\"-12\", \"-16\"]\nk = 6\nstrategy = \"grid\"\n[d]\npoints = 9\n").unwrap();
    let o = run(&["search", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["below_threshold"], true);
    assert_eq!(v["systems"], 2);
}

#[test]
fn unknown_config_field_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("search.json");
    std::fs::write(&config, r#"{"alpha": "-16", "bogus": 1}"#).unwrap();
    assert_eq!(code(&run(&["search", "--config", config.to_str().unwrap()])), 1);
}

#[test]
fn reproduce_weight_table() {
    let o = run(&["reproduce", "--table", "3"]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&stdout(&o));
    let row = rows.iter().find(|r| r[2] == "5.05951042777e-6").unwrap();
    assert_eq!(row[1], "2k+2");
    assert_eq!(row[5], "true");
}

#[test]
fn reproduce_parameter_table_flags_deltas() {
    let o = run(&["reproduce", "--table", "4"]);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 22);
    let disagreeing: Vec<&str> =
        rows.iter().filter(|r| r[6] == "true" && r[5] == "false").map(|r| r[0].as_str()).collect();
    // Exit 2 exactly when a recovered coefficient is outside the tolerance.
    assert_eq!(code(&o), if disagreeing.is_empty() { 0 } else { 2 });
}

#[test]
fn reproduce_search_and_asymptotic_tables() {
    for table in ["1", "2", "5"] {
        let o = run(&["reproduce", "--table", table]);
        assert_eq!(code(&o), 0, "table {table}");
    }
    let o = run(&["asymptotic", "--k-from", "10", "--k-to", "17"]);
    assert_eq!(code(&o), 0);
    assert_eq!(csv_rows(&stdout(&o)).len(), 8);
    assert_eq!(code(&run(&["reproduce", "--table", "6"])), 2);
}
