//! End-to-end runs of the `poisfol` binary: exit codes, output routing and flags.

use std::process::{Command, Output};

fn poisfol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_poisfol")).args(args).output().expect("binary runs")
}

fn scratch(name: &str, contents: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("poisfol-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn bundled_example_passes_with_exit_zero() {
    let out = poisfol(&["run", "--example", "t3_obstructed"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["summary"]["failed"], 0);
    assert_eq!(doc["tasks"][3]["result"]["value"], "-2*d1^d2^d3");
}

#[test]
fn empty_task_list_exits_zero() {
    let path = scratch("empty.json", r#"{"name": "empty", "dimension": 2, "splitting": {"leaf": [1, 2]}, "poisson": "d1^d2"}"#);
    let out = poisfol(&["run", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["summary"]["tasks"], 0);
}

#[test]
fn failed_expectation_exits_one() {
    let path = scratch(
        "wrong.json",
        r#"{"name": "wrong", "dimension": 3, "splitting": {"leaf": [1, 2]}, "poisson": "d1^d2",
            "tasks": [{"type": "l2", "id": "x", "left": "sin(t3)*d1^d3 + cos(t3)*d2^d3",
                       "right": "sin(t3)*d1^d3 + cos(t3)*d2^d3", "expect": "2*d1^d2^d3"}]}"#,
    );
    let out = poisfol(&["run", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let doc = stdout_json(&out);
    assert_eq!(doc["tasks"][0]["status"], "fail");
    assert_eq!(doc["tasks"][0]["checks"][0]["computed"], "-2*d1^d2^d3");
}

#[test]
fn schema_errors_exit_two() {
    let unknown_field = scratch("schema.json", r#"{"name": "s", "dimension": 2, "splitting": {"leaf": [1]}, "poisson": "d1^d2", "extra": 1}"#);
    assert_eq!(poisfol(&["run", "--scenario", unknown_field.to_str().unwrap()]).status.code(), Some(2));
    let bad_leaf = scratch("leaf.json", r#"{"name": "s", "dimension": 2, "splitting": {"leaf": [3]}, "poisson": "d1^d2"}"#);
    assert_eq!(poisfol(&["run", "--scenario", bad_leaf.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(poisfol(&["run", "--example", "t3_obstructed", "--bogus"]).status.code(), Some(2));
    assert_eq!(poisfol(&["run"]).status.code(), Some(2));
    assert_eq!(poisfol(&["run", "--example", "no_such_example"]).status.code(), Some(2));
    assert_eq!(poisfol(&["run", "--scenario", "/nonexistent/scenario.json"]).status.code(), Some(2));
}

#[test]
fn elaboration_errors_exit_three() {
    let syntax = scratch("syntax.json", r#"{"name": "s", "dimension": 2, "splitting": {"leaf": [1, 2]}, "poisson": "d1^^d2"}"#);
    let out = poisfol(&["run", "--scenario", syntax.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("elaboration"));
    let uncertified = scratch(
        "div.json",
        r#"{"name": "s", "dimension": 2, "splitting": {"leaf": [1, 2]}, "poisson": "d1^d2",
            "tasks": [{"type": "schouten", "id": "x", "left": "d1", "right": "1/sin(t1)*d2"}]}"#,
    );
    assert_eq!(poisfol(&["run", "--scenario", uncertified.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn output_flag_writes_the_report() {
    let dir = std::env::temp_dir().join(format!("poisfol-cli-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = poisfol(&["run", "--example", "t4_variation", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    let printed = poisfol(&["run", "--example", "t4_variation"]).stdout;
    assert_eq!(written.as_bytes(), printed.as_slice());
}

#[test]
fn parallel_and_seed_flags_keep_reports_stable() {
    let base = poisfol(&["run", "--example", "t4_dgla_unobstructed"]).stdout;
    assert_eq!(poisfol(&["run", "--example", "t4_dgla_unobstructed", "--parallel"]).stdout, base);
    let seeded = poisfol(&["run", "--example", "t4_dgla_unobstructed", "--seed", "99"]);
    assert_eq!(seeded.status.code(), Some(0));
    assert_eq!(poisfol(&["run", "--example", "t4_dgla_unobstructed", "--seed", "99"]).stdout, seeded.stdout);
}

#[test]
fn full_complex_flag_switches_the_default_complex() {
    let path = scratch(
        "full.json",
        r#"{"name": "s", "dimension": 4, "splitting": {"leaf": [1, 2]}, "poisson": "(sin(t4) + 2)*d1^d2",
            "tasks": [{"type": "exactness", "id": "w", "cocycle": "cos(t4)*d1^d2^d3"}]}"#,
    );
    let p = path.to_str().unwrap();
    let good = stdout_json(&poisfol(&["run", "--scenario", p]));
    assert_eq!(good["tasks"][0]["result"]["verdict"], "not-exact");
    let full = stdout_json(&poisfol(&["run", "--scenario", p, "--full-complex"]));
    assert_eq!(full["tasks"][0]["result"]["verdict"], "exact");
}

#[test]
fn text_format_has_one_status_line_per_task() {
    let out = poisfol(&["run", "--example", "t4_variation", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 3);
    assert!(text.ends_with("3 tasks, 0 failed\n"));
}

#[test]
fn list_examples_names_every_bundled_scenario() {
    let out = poisfol(&["list-examples", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let list = stdout_json(&out);
    let names: Vec<&str> = list.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert_eq!(
        names,
        ["t3_obstructed", "t4_rank_two_obstructed", "t4_family_a", "t4_family_b", "t4_dgla_unobstructed", "t5_projection_obstructed", "t4_variation"]
    );
}
