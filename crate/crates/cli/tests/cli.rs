use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn igklo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_igklo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("structured output is JSON")
}

fn config_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".toml").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn strip_timings(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("millis");
            m.values_mut().for_each(strip_timings);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timings),
        _ => {}
    }
}

#[test]
fn catalog_lists_every_instance() {
    let out = igklo(&["catalog", "--format", "structured"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "igklo-report/1");
    let names: Vec<&str> = v["instances"]
        .as_array()
        .unwrap()
        .iter()
        .map(|i| i["name"].as_str().unwrap())
        .collect();
    assert_eq!(names.len(), 10);
    assert!(names.contains(&"qsA2-v11"));
}

#[test]
fn catalog_name_resolves_to_quasi_split_a2() {
    let out = igklo(&[
        "validate",
        "--instance",
        "qsA2-v11",
        "--format",
        "structured",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let inst = &json(&out)["instances"][0];
    assert_eq!(inst["tau"], serde_json::json!([2, 1]));
    assert_eq!(inst["v"], serde_json::json!([1, 1]));
}

#[test]
fn adjacent_thetas_are_rejected() {
    let cfg = config_file(
        r#"
        schema = "igklo-config/1"
        [instance]
        type = "A"
        rank = 2
        lambda = [1, 1]
        mu = [0, 0]
        theta = [1, 1]
        "#,
    );
    let out = igklo(&["validate", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("adjacent nodes 1 and 2"));
}

#[test]
fn missing_config_is_an_input_error() {
    let out = igklo(&["check", "--config", "/nonexistent/run.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_instance_is_an_input_error() {
    let out = igklo(&["check", "--instance", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn serre3_filter_on_a4_selects_the_middle_pair() {
    let out = igklo(&[
        "check",
        "--instance",
        "qsA4-v1111",
        "--relations",
        "Serre3",
        "--format",
        "structured",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let entries = v["instances"][0]["report"]["entries"].as_array().unwrap();
    let pairs: Vec<(u64, u64)> = entries
        .iter()
        .map(|e| {
            assert_eq!(e["kind"], "Serre3");
            (e["i"].as_u64().unwrap(), e["j"].as_u64().unwrap())
        })
        .collect();
    assert_eq!(pairs, vec![(2, 3), (3, 2)]);
}

#[test]
fn inline_instance_matches_catalog_run() {
    let cfg = config_file(
        r#"
        [instance]
        name = "inline-qsA2"
        type = "A"
        rank = 2
        tau = [[1, 2]]
        lambda = [1, 1]
        mu = [0, 0]

        [oracle]
        trials = 4
        seed = 11
        "#,
    );
    let out = igklo(&[
        "check",
        "--config",
        cfg.path().to_str().unwrap(),
        "--relations",
        "BB3,Serre3",
        "--format",
        "structured",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let v = json(&out);
    assert_eq!(v["seed"], 11);
    assert_eq!(v["trials"], 4);
    assert_eq!(
        v["instances"][0]["report"]["entries"]
            .as_array()
            .unwrap()
            .len(),
        4
    );
}

#[test]
fn corrupted_image_fails_with_supports() {
    let out = igklo(&[
        "check",
        "--instance",
        "qsA2-v11",
        "--relations",
        "BB3",
        "--corrupt",
        "flip-wp",
        "--format",
        "structured",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let entries = v["instances"][0]["report"]["entries"].as_array().unwrap();
    let failing: Vec<&Value> = entries.iter().filter(|e| e["status"] == "fail").collect();
    assert!(!failing.is_empty());
    assert!(failing
        .iter()
        .all(|e| !e["discrepancies"].as_array().unwrap().is_empty()));
    assert!(failing[0]["discrepancies"][0]["pins"]
        .as_str()
        .unwrap()
        .contains("u="));
}

#[test]
fn reports_are_deterministic_for_a_seed() {
    let args = [
        "check",
        "--instance",
        "splitA1-v1-t1",
        "--seed",
        "99",
        "--trials",
        "5",
        "--format",
        "structured",
    ];
    let (a, b) = (igklo(&args), igklo(&args));
    assert_eq!(a.status.code(), Some(0));
    let (mut x, mut y) = (json(&a), json(&b));
    strip_timings(&mut x);
    strip_timings(&mut y);
    assert_eq!(x, y);
}

#[test]
fn image_prints_normal_form() {
    let out = igklo(&["image", "--instance", "splitA1-v1-t1", "--node", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("B_1(u) on splitA1-v1-t1"));
    assert!(text.contains("δ("));
    assert_eq!(
        igklo(&["image", "--instance", "splitA1-v1-t1", "--node", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn bad_flag_value_is_an_input_error() {
    assert_eq!(
        igklo(&["check", "--bb1-convention", "both"]).status.code(),
        Some(2)
    );
}
