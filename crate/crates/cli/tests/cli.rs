use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn closure(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_closure")).args(args).output().expect("binary runs")
}

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn write(dir: &TempDir, name: &str, value: &Value) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().unwrap_or_default();
    serde_json::from_str(line).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {text}"))
}

fn simple_reach() -> Value {
    json!({
        "dimension": 1,
        "alphabet": ["a", "b"],
        "phi": { "a": [["2"]], "b": [["1/2"]] },
        "omega": { "a": 1, "b": -1 },
        "mode": "reach",
        "degree": 1
    })
}

#[test]
fn run_reports_the_ideal() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "simple.json", &simple_reach());
    let out = closure(&["run", &file]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["generators"], json!(["x11 - 1"]));
    assert_eq!(report["oracle_checked"], json!(true));
    assert_eq!(report["eta_overridden"], json!(false));
}

#[test]
fn text_output_lists_generators() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "simple.json", &simple_reach());
    let out = closure(&["run", &file, "--text", "--no-oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("x11 - 1"), "{text}");
    assert!(text.contains("oracle: not run"), "{text}");
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let mut inst = simple_reach();
    inst["mode"] = json!("cover");
    inst["degree"] = json!(3);
    let file = write(&dir, "cover.json", &inst);
    let first = closure(&["run", &file, "--no-oracle"]);
    let second = closure(&["run", &file, "--no-oracle"]);
    let strip = |o: &Output| {
        let mut v = stdout_json(o);
        v["timings"] = Value::Null;
        v
    };
    assert_eq!(strip(&first), strip(&second));
}

#[test]
fn schema_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let mut inst = simple_reach();
    inst.as_object_mut().unwrap().remove("degree");
    let file = write(&dir, "bad.json", &inst);
    let out = closure(&["run", &file]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["error"], json!("schema"));
    assert_eq!(err["exit_code"], json!(2));

    let missing = dir.path().join("missing.json");
    let out = closure(&["run", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], json!("io"));
}

#[test]
fn heavy_weights_are_rejected_with_a_normalization_hint() {
    let dir = TempDir::new().unwrap();
    let mut inst = simple_reach();
    inst["omega"]["a"] = json!(2);
    let file = write(&dir, "heavy.json", &inst);
    let out = closure(&["run", &file]);
    assert_eq!(out.status.code(), Some(2));
    let message = stderr_json(&out)["message"].as_str().unwrap().to_string();
    assert!(message.contains("Normalize"), "{message}");
}

#[test]
fn default_threshold_in_dimension_two_is_refused() {
    let dir = TempDir::new().unwrap();
    let inst = json!({
        "dimension": 2,
        "alphabet": ["a", "b"],
        "phi": { "a": [["1", "1"], ["0", "1"]], "b": [["1", "0"], ["1", "1"]] },
        "omega": { "a": 1, "b": -1 },
        "mode": "reach",
        "degree": 2
    });
    let file = write(&dir, "dyck.json", &inst);
    let out = closure(&["run", &file]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr_json(&out);
    assert_eq!(err["error"], json!("infeasible"));
    assert!(err["message"].as_str().unwrap().contains("eta_override"));

    let out = closure(&["run", &file, "--eta-override", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["eta_used"], json!(3));
}

#[test]
fn misleading_oracle_stabilization_exits_4() {
    // Only words of length 6 are accepted, so an oracle bounded by length 5
    // sees nothing, looks stable, and contradicts the true answer.
    let states: Vec<String> = (0..=6).map(|i| format!("q{i}")).collect();
    let transitions: Vec<Value> = (0..6).map(|i| json!([format!("q{i}"), "a", format!("q{}", i + 1)])).collect();
    let inst = json!({
        "dimension": 1,
        "alphabet": ["a"],
        "phi": { "a": [["2"]] },
        "mode": "regular",
        "degree": 1,
        "nfa": { "states": states, "initial": ["q0"], "accepting": ["q6"], "transitions": transitions },
        "oracle_max_len": 5
    });
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "long.json", &inst);
    let out = closure(&["run", &file]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(stderr_json(&out)["error"], json!("oracle_disagreement"));

    let out = closure(&["run", &file, "--oracle-max-len", "8"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["generators"], json!(["x11 - 64"]));
}

#[test]
fn empty_corpus_passes() {
    let dir = TempDir::new().unwrap();
    let out = closure(&["verify-corpus", "--dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["entries"], json!([]));
}

#[test]
fn corrupted_expectation_fails_the_corpus() {
    let dir = TempDir::new().unwrap();
    let text = std::fs::read_to_string(corpus_dir().join("simple-reach.json")).unwrap();
    let mut entry: Value = serde_json::from_str(&text).unwrap();
    entry["expect"]["published_ideal"] = json!(["x11 - 2"]);
    write(&dir, "corrupted.json", &entry);
    let out = closure(&["verify-corpus", "--dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    assert_eq!(report["entries"][0]["status"], json!("FAIL"));
}

#[test]
fn corpus_instance_runs_directly() {
    let file = corpus_dir().join("anbn-reach.json");
    let out = closure(&["run", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!stdout_json(&out)["generators"].as_array().unwrap().is_empty());
}

#[test]
fn tree_of_the_instance_word() {
    let dir = TempDir::new().unwrap();
    let mut inst = simple_reach();
    inst["word"] = json!(["a", "a", "b", "a", "a", "a", "b", "a"]);
    let file = write(&dir, "word.json", &inst);
    let out = closure(&["tree", &file, "--sign", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["valid"], json!(true));
    assert_eq!(v["length"], json!(8));
    assert!(v["height"].as_u64().unwrap() <= v["height_bound"].as_u64().unwrap());
    assert!(v["stable_factor"]["weight"].as_i64().unwrap() > 0);

    inst.as_object_mut().unwrap().remove("word");
    let file = write(&dir, "noword.json", &inst);
    assert_eq!(closure(&["tree", &file]).status.code(), Some(2));
}

#[test]
fn automaton_dump_is_json() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "simple.json", &simple_reach());
    for which in ["cover", "reach", "zero", "bz"] {
        let out = closure(&["automaton", &file, "--which", which]);
        assert_eq!(out.status.code(), Some(0), "{which}: {}", String::from_utf8_lossy(&out.stderr));
        let v = stdout_json(&out);
        assert!(!v["states"].as_array().unwrap().is_empty(), "{which}");
    }
}

#[test]
fn oracle_subcommand() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "simple.json", &simple_reach());
    let out = closure(&["oracle", &file, "--max-len", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["generators"], json!(["x11 - 1"]));
    assert_eq!(v["achieved_len"], json!(10));
}
