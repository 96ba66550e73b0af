//! The `epbes` executable: exit codes, configuration, determinism and the
//! JSON schemas.

mod common;

use std::path::PathBuf;
use std::process::{Command, Output};

use common::fixture;
use serde_json::Value;

fn epbes(args: &[&str]) -> Output {
    epbes_with(args, &[])
}

fn epbes_with(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_epbes"));
    cmd.args(args).env_remove("EPBES_SMT_CMD").env_remove("EPBES_MAX_ITER").env_remove("EPBES_FORMAT");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn path(name: &str) -> String {
    fixture(name).to_str().unwrap().to_string()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn schema_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

/// Serves the sibling schema files to `$ref`s.
struct SchemaFiles;

impl jsonschema::Retrieve for SchemaFiles {
    fn retrieve(&self, uri: &jsonschema::Uri<String>) -> Result<Value, Box<dyn std::error::Error + Send + Sync>> {
        let name = uri.path().as_str().rsplit('/').next().unwrap_or_default().to_string();
        Ok(serde_json::from_str(&std::fs::read_to_string(schema_dir().join(name))?)?)
    }
}

/// Validates `doc` against `schemas/<name>.schema.json`.
fn conforms(name: &str, doc: &Value) {
    let text = std::fs::read_to_string(schema_dir().join(format!("{name}.schema.json"))).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    let validator = jsonschema::options().with_retriever(SchemaFiles).build(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| format!("{e} at {}", e.instance_path())).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}\n{doc:#}");
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn solve_exit_codes() {
    let e4 = path("e4.pbes");
    for (q, want) in [("X1(2)", 0), ("X1(40)", 0), ("X1(3)", 1), ("X1(101)", 1)] {
        let o = epbes(&["solve", &e4, "--query", q]);
        assert_eq!(code(&o), want, "{q}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = epbes(&["solve", &path("mccarthy3.pbes"), "--query", "M(0,4)"]);
    assert_eq!(code(&o), 1);
    let o = epbes(&["solve", &path("countdown.pbes"), "--query", "X(5)", "--max-iter", "20"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("diverged after 20 iterations"), "{}", stdout(&o));
}

#[test]
fn input_and_solver_errors() {
    let e4 = path("e4.pbes");
    assert_eq!(code(&epbes(&["solve", &e4, "--query", "X1(true)"])), 3);
    assert_eq!(code(&epbes(&["solve", &e4, "--query", "Y(2)"])), 3);
    assert_eq!(code(&epbes(&["solve", "/nonexistent.pbes", "--query", "X1(2)"])), 3);
    assert_eq!(code(&epbes(&["solve", &e4])), 3);
    assert_eq!(code(&epbes(&["solve", &e4, "--query", "X1(2)", "--max-iter", "0"])), 3);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pbes");
    std::fs::write(&bad, "nu X(n:N) = forall m:N . X(n + m);").unwrap();
    assert_eq!(code(&epbes(&["normalize", bad.to_str().unwrap()])), 3);
    std::fs::write(&bad, "nu X(n:N) = X(n +);").unwrap();
    assert_eq!(code(&epbes(&["parse", bad.to_str().unwrap()])), 3);
    let o = epbes(&["solve", &e4, "--query", "X1(2)", "--smt-cmd", "/nonexistent/solver"]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn configuration_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("epbes.toml");
    std::fs::write(&cfg, "max-iter = 3\nformat = \"json\"\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let countdown = path("countdown.pbes");
    let o = epbes(&["--config", cfg, "refine", &countdown]);
    assert_eq!(json(&o)["iterations"], 3);
    let o = epbes_with(&["--config", cfg, "refine", &countdown], &[("EPBES_MAX_ITER", "4")]);
    assert_eq!(json(&o)["iterations"], 4);
    let o = epbes_with(&["--config", cfg, "refine", &countdown, "--max-iter", "5"], &[("EPBES_MAX_ITER", "4")]);
    assert_eq!(json(&o)["iterations"], 5);
    // A broken solver from the environment is overridden by the flag.
    let e4 = path("e4.pbes");
    let o = epbes_with(&["solve", &e4, "--query", "X1(2)"], &[("EPBES_SMT_CMD", "/nonexistent/solver")]);
    assert_eq!(code(&o), 4);
    let o = epbes_with(&["solve", &e4, "--query", "X1(2)", "--smt-cmd", "z3"], &[("EPBES_SMT_CMD", "/nonexistent/solver")]);
    assert_eq!(code(&o), 0);
    std::fs::write(dir.path().join("bad.toml"), "max_iterations = 3\n").unwrap();
    let o = epbes(&["--config", dir.path().join("bad.toml").to_str().unwrap(), "parse", &e4]);
    assert_eq!(code(&o), 3);
}

#[test]
fn json_outputs_conform_and_are_deterministic() {
    let e4 = path("e4.pbes");
    let mc = path("mccarthy3.pbes");
    let countdown = path("countdown.pbes");
    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("parse", vec!["parse", &e4]),
        ("normalize", vec!["normalize", &mc]),
        ("refine", vec!["refine", &e4, "--trace"]),
        ("refine", vec!["refine", &countdown, "--max-iter", "6"]),
        ("solve", vec!["solve", &e4, "--query", "X1(2)"]),
        ("solve", vec!["solve", &countdown, "--query", "X(5)", "--max-iter", "5"]),
        ("game", vec!["export", &e4]),
        ("game", vec!["export", &mc, "--query", "M(5,4)", "--prune"]),
        ("prove", vec!["prove", &mc, "--query", "M(2,3)"]),
        ("prove", vec!["prove", &e4, "--query", "X1(2)", "--budget", "6"]),
        ("oracle", vec!["oracle", &e4, "--query", "X1(2)", "--value-cap", "30", "--witness-cap", "4"]),
        ("oracle", vec!["oracle", &mc, "--query", "M(0,4)", "--value-cap", "20", "--witness-cap", "20"]),
    ];
    for (schema, args) in runs {
        let mut args = args;
        args.extend(["--format", "json"]);
        let first = epbes(&args);
        let second = epbes(&args);
        assert!(code(&first) <= 2, "{args:?}: {}", String::from_utf8_lossy(&first.stderr));
        assert_eq!(first.stdout, second.stdout, "{args:?} is not deterministic");
        conforms(schema, &json(&first));
    }
}

#[test]
fn prove_then_validate() {
    let mc = path("mccarthy3.pbes");
    let o = epbes(&["prove", &mc, "--query", "M(5,4)", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let doc = json(&o);
    assert_eq!(doc["closed"], true);
    assert_eq!(doc["proof_graph"]["vertices"].as_array().unwrap().len(), 2);
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("proof.json");
    std::fs::write(&file, serde_json::to_string(&doc).unwrap()).unwrap();
    let o = epbes(&["validate", &mc, "--graph", file.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&o), 0);
    conforms("validate", &json(&o));
    assert_eq!(json(&o)["ok"], true);

    // Drop every edge of the bare proof graph.
    let mut graph = doc["proof_graph"].clone();
    conforms("proof-graph", &graph);
    graph["edges"] = Value::Array(Vec::new());
    std::fs::write(&file, serde_json::to_string(&graph).unwrap()).unwrap();
    let o = epbes(&["validate", &mc, "--graph", file.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&o), 1);
    let report = json(&o);
    conforms("validate", &report);
    assert_eq!(report["violations"][0]["condition"], 1);
    assert_eq!(report["violations"][0]["at"], "M(5, 4)");

    let o = epbes(&["prove", &path("e4.pbes"), "--query", "X1(3)"]);
    assert_eq!(code(&o), 1);
    std::fs::write(&file, "{\"vertices\": [], \"edges\": [[0, 1]]}").unwrap();
    assert_eq!(code(&epbes(&["validate", &mc, "--graph", file.to_str().unwrap()])), 3);
}

#[test]
fn odd_cycle_graph_fails_condition_two() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("cycle.json");
    let graph = r#"{"vertices": [
        {"name": "Y", "values": [0], "annotation": {"clause": 0, "witness": []}},
        {"name": "Y", "values": [1], "annotation": {"clause": 0, "witness": []}}],
      "edges": [[0, 1], [1, 0]]}"#;
    std::fs::write(&file, graph).unwrap();
    let o = epbes(&["validate", &path("parity_cycle.pbes"), "--graph", file.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("cycle check at Y(0)"), "{}", stdout(&o));
}

#[test]
fn dot_outputs() {
    let e4 = path("e4.pbes");
    let o = epbes(&["export", &e4, "--format", "dot"]);
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph game {"));
    assert_eq!(dot.matches("shape=ellipse").count(), 2);
    assert_eq!(dot.matches("shape=box").count(), 4);
    assert!(dot.contains("prio 0"));
    let o = epbes(&["oracle", &path("countdown.pbes"), "--query", "X(5)", "--value-cap", "10", "--witness-cap", "1", "--vertex-cap", "100", "--format", "dot"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("digraph explicit {"));
    let o = epbes(&["prove", &path("mccarthy3.pbes"), "--query", "M(5,4)", "--format", "dot"]);
    let dot = stdout(&o);
    assert!(dot.contains("digraph proof {") && dot.contains("digraph strategy {"));
}

#[test]
fn normalize_prints_one_clause_per_line() {
    let o = epbes(&["normalize", &path("e2.pbes")]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.trim_start().starts_with("||")).count(), 2);
    // The printed clause form parses again.
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("n.pbes");
    std::fs::write(&file, &text).unwrap();
    assert_eq!(code(&epbes(&["parse", file.to_str().unwrap()])), 0);
}

#[test]
fn schemas_reject_malformed_documents() {
    let text = std::fs::read_to_string(schema_dir().join("solve.schema.json")).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    let validator = jsonschema::options().with_retriever(SchemaFiles).build(&schema).unwrap();
    let good = serde_json::json!({
        "query": "X(1)", "verdict": "true", "saturated": true, "iterations": 1,
        "vertex_count": 2, "vertex": 0, "oracle": {"verdict": "true", "closed": true}
    });
    assert!(validator.is_valid(&good));
    let mut bad = good.clone();
    bad["verdict"] = Value::from("maybe");
    assert!(!validator.is_valid(&bad));
    let mut extra = good;
    extra["elapsed_ms"] = Value::from(3);
    assert!(!validator.is_valid(&extra));
}
