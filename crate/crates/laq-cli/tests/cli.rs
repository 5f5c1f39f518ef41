//! End-to-end tests of the `laq` binary: text goldens, exit codes, and the
//! JSON output schema of every subcommand.

use std::process::{Command, Output};

use serde_json::Value;

fn laq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_laq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = laq(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 output")
}

fn json_of(args: &[&str]) -> Value {
    serde_json::from_str(&stdout_of(args)).expect("JSON output")
}

fn exit_code(args: &[&str]) -> i32 {
    laq(args).status.code().expect("exit code")
}

/// The common envelope: command tag plus the input echo.
fn assert_envelope(v: &Value, command: &str, knot: &str) {
    assert_eq!(v["command"], command);
    assert_eq!(v["input"]["knot"], knot);
    assert!(v["input"]["pd"].is_string());
}

#[test]
fn alex_prints_the_reduced_polynomial() {
    assert_eq!(stdout_of(&["alex", "--knot", "4_1"]), "Δ⁰(T) = T^2 - 3T + 1\n");
    assert_eq!(stdout_of(&["alex", "--knot", "3_1"]), "Δ⁰(T) = T^2 - T + 1\n");
}

#[test]
fn alex_json_schema() {
    let v = json_of(&["alex", "--knot", "4_1", "--json"]);
    assert_envelope(&v, "alex", "4_1");
    assert_eq!(v["reduced"], "T^2 - 3T + 1");
    assert!(v["raw"].is_string());
    assert_eq!(v["vanishes"], false);
    assert_eq!(v["by_minor_consistent"], true);
}

#[test]
fn mdet_range_is_inclusive_and_quadratic() {
    let out = stdout_of(&["mdet", "--knot", "4_1", "--m", "2..13"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 12);
    for (line, m) in lines.iter().zip(2i64..=13) {
        assert_eq!(*line, format!("Δ⁰({m}) = {}", m * m - 3 * m + 1));
    }
}

#[test]
fn mdet_accepts_negative_single_values() {
    let out = stdout_of(&["mdet", "--knot", "8_7", "--m", "-1"]);
    assert_eq!(out, "Δ⁰(-1) = 23\n");
    let v = json_of(&["mdet", "--knot", "8_7", "--m", "-1", "--json"]);
    assert_envelope(&v, "mdet", "8_7");
    assert_eq!(v["values"][0]["m"], -1);
    assert_eq!(v["values"][0]["det"], "23");
}

#[test]
fn color_json_schema() {
    let v = json_of(&["color", "--knot", "6_1", "--p", "5", "--m", "3", "--json"]);
    assert_envelope(&v, "color", "6_1");
    assert_eq!(v["p"], 5);
    assert_eq!(v["m"], 3);
    assert_eq!(v["total"], "25");
    assert_eq!(v["trivial"], 5);
    assert_eq!(v["nontrivial"], "20");
    assert_eq!(v["min_colors"], 5);
    let hist = v["histogram"].as_array().expect("histogram array");
    assert!(hist.iter().all(|e| e["colors"].is_u64() && e["count"].is_u64()));
}

#[test]
fn bounds_text_and_json() {
    let out = stdout_of(&["bounds", "--knot", "8_7", "--p", "23", "--m", "2"]);
    assert!(out.contains("best_lower = 6"), "missing bound in {out:?}");
    let v = json_of(&["bounds", "--knot", "8_7", "--p", "23", "--m", "2", "--json"]);
    assert_envelope(&v, "bounds", "8_7");
    assert_eq!(v["best_lower"], 6);
    assert_eq!(v["log_bound"], 6);
    assert_eq!(v["min3_applicable"], true);
    assert_eq!(v["needs_four"], false);
    assert_eq!(v["blocking_condition"], "MEqualsTwo");
    assert_eq!(v["m_used"], "2");
}

#[test]
fn orbits_json_schema() {
    let v = json_of(&[
        "orbits", "--knot", "3_1", "--p", "3", "--m", "2", "--verify-free", "--json",
    ]);
    assert_envelope(&v, "orbits", "3_1");
    assert_eq!(v["nontrivial"], 6);
    let classes = v["orbit_classes"].as_array().expect("classes array");
    assert_eq!(classes.len(), 1);
    assert_eq!(classes[0]["size"], 6);
    assert_eq!(classes[0]["distinct_colors"], 3);
    assert!(classes[0]["representative"].is_array());
    assert_eq!(v["free_on_nontrivial"], true);
}

#[test]
fn palette_json_schema_and_dot_output() {
    let dir = std::env::temp_dir().join("laq-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let dot_path = dir.join("palette.dot");
    let dot_arg = dot_path.display().to_string();
    let v = json_of(&[
        "palette", "--knot", "6_1", "--p", "0", "--m", "2", "--dot", &dot_arg, "--json",
    ]);
    assert_envelope(&v, "palette", "6_1");
    assert_eq!(v["coloring"], serde_json::json!(["0", "1", "2", "3", "2", "1"]));
    assert_eq!(v["connected"], true);
    assert!(v["graph"]["vertices"].is_array());
    assert!(v["graph"]["edges"].is_array());
    let lemma = &v["det_lemma"];
    assert_eq!(lemma["all_hold"], true);
    assert!(lemma["columns"]
        .as_array()
        .expect("columns")
        .iter()
        .all(|c| c["det"] == "0"));
    let dot = std::fs::read_to_string(&dot_path).expect("dot written");
    assert!(dot.starts_with("digraph palette"), "unexpected DOT: {dot:?}");
    std::fs::remove_file(&dot_path).unwrap();
}

#[test]
fn palette_accepts_explicit_colorings() {
    let out = stdout_of(&[
        "palette", "--knot", "3_1", "--p", "3", "--m", "2", "--coloring", "0,1,2",
    ]);
    assert!(out.contains("vertices = 3"), "got {out:?}");
    let code = exit_code(&[
        "palette", "--knot", "3_1", "--p", "3", "--m", "2", "--coloring", "0,1,1",
    ]);
    assert_eq!(code, 2, "invalid coloring is a domain error");
}

#[test]
fn mincol_search_json_schema() {
    let v = json_of(&[
        "mincol", "--knot", "3_1", "--p", "7", "--m", "3", "--search", "--json",
    ]);
    assert_envelope(&v, "mincol", "3_1");
    assert_eq!(v["census_min_colors"], 3);
    assert_eq!(v["lower_bound"], 3);
    let search = &v["search"];
    assert_eq!(search["colors_used"], 3);
    assert_eq!(search["reached_lower_bound"], true);
    assert_eq!(search["budget_exhausted"], false);
    assert!(search["trace"].as_array().expect("trace").is_empty());
    assert!(search["final_pd"].is_string());
}

#[test]
fn mincol_accepts_budget_specs() {
    let out = stdout_of(&[
        "mincol", "--knot", "3_1", "--p", "7", "--m", "3", "--search", "--budget",
        "time=5,states=100,depth=3,crossings=6,prune=true",
    ]);
    assert!(out.contains("colors_used = 3"), "got {out:?}");
    let code = exit_code(&[
        "mincol", "--knot", "3_1", "--p", "7", "--m", "3", "--budget", "fuel=9",
    ]);
    assert_eq!(code, 2, "unknown budget key is a domain error");
}

#[test]
fn kh_json_schema() {
    let v = json_of(&["kh", "--knot", "8_7", "--p", "23", "--m", "2", "--json"]);
    assert_envelope(&v, "kh", "8_7");
    assert_eq!(v["nontrivial"], "506");
    assert_eq!(v["injective_count"], 506);
    assert_eq!(v["admits_injective"], true);
    assert_eq!(v["alternating"], true);
}

#[test]
fn pd_files_are_accepted() {
    let dir = std::env::temp_dir().join("laq-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("trefoil.pd");
    std::fs::write(&path, "X[1,4,2,5]\nX[3,6,4,1]\nX[5,2,6,3]\n").unwrap();
    let arg = path.display().to_string();
    assert_eq!(stdout_of(&["alex", "--pd", &arg]), "Δ⁰(T) = T^2 - T + 1\n");
    let v = json_of(&["alex", "--pd", &arg, "--json"]);
    assert_eq!(v["input"]["knot"], Value::Null);
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn exit_codes_separate_usage_from_domain_errors() {
    assert_eq!(exit_code(&["alex", "--knot", "10_99"]), 2, "unknown knot");
    assert_eq!(exit_code(&["color", "--knot", "3_1", "--p", "9", "--m", "2"]), 2, "composite p");
    assert_eq!(exit_code(&["alex"]), 1, "missing source");
    assert_eq!(exit_code(&["frobnicate"]), 1, "unknown subcommand");
    assert_eq!(exit_code(&["alex", "--knot", "3_1", "--pd", "x"]), 1, "conflicting sources");
    assert_eq!(exit_code(&["--help"]), 0, "help is not an error");
}
