use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bayes-welfare"));
    // keep ambient overrides out of the tests
    for (k, _) in std::env::vars() {
        if k.starts_with("BAYES_WELFARE_") {
            c.env_remove(k);
        }
    }
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// Two players with disjoint coverage and zero payoffs: the marginal
/// contribution condition fails.
const NOT_VALID: &str = r#"{
  "schema_version": 1,
  "players": ["P1", "P2"],
  "types": [["t"], ["t"]],
  "prior": {"profiles": [{"types": ["t", "t"], "p": 1.0}]},
  "actions": [{"player": "P1", "type": "t", "ids": ["x"]}, {"player": "P2", "type": "t", "ids": ["y"]}],
  "null_actions": ["null:P1", "null:P2"],
  "welfare": {"variant": "weighted_coverage", "ground": ["x", "y", "null:P1", "null:P2"],
              "universe": ["u", "v"], "weights": [1.0, 1.0], "covers": {"x": ["u"], "y": ["v"]}},
  "utilities": {"variant": "explicit_table", "entries": [
    {"actions": ["x", "y"], "payoffs": [0.0, 0.0]},
    {"actions": ["x", "null:P2"], "payoffs": [0.0, 0.0]},
    {"actions": ["null:P1", "y"], "payoffs": [0.0, 0.0]},
    {"actions": ["null:P1", "null:P2"], "payoffs": [0.0, 0.0]}]}
}"#;

#[test]
fn validate_reference_game_succeeds() {
    let out = run(&["validate", "--recipe", "figure2:eps=0.01"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["status"], "ok");
    assert_eq!(doc["result"]["conditions"]["basic"], true);
    assert_eq!(doc["run_config"]["command"]["recipe"], "figure2:eps=0.01");
}

#[test]
fn violated_conditions_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("game.json");
    std::fs::write(&path, NOT_VALID).unwrap();
    let out = run(&["validate", "--game", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["result"]["conditions"]["valid"], false);
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{ not json").unwrap();
    assert_eq!(run(&["validate", "--game", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["validate", "--game", "/nonexistent/game.json"]).status.code(), Some(2));
    let unknown = run(&["equilibrium", "--recipe", "figure2", "--concept", "nash-ish"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert_eq!(run(&["validate", "--recipe", "figure2", "--budget-enum", "0"]).status.code(), Some(2));
}

#[test]
fn budget_refusals_exit_three() {
    let out = run(&["equilibrium", "--recipe", "priority:n=4", "--concept", "sfce", "--budget-lp", "10"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["status"], "budget_refusal");
}

#[test]
fn identical_configs_give_identical_bytes() {
    let args = ["welfare", "--recipe", "random:players=3,types=2,seed=7", "--seed", "5"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn environment_overrides_flags() {
    let flags = run(&["equilibrium", "--recipe", "figure2:eps=0.01", "--concept", "com-eq,bs", "--sense", "max"]);
    let env = bin()
        .args(["equilibrium"])
        .env("BAYES_WELFARE_RECIPE", "figure2:eps=0.01")
        .env("BAYES_WELFARE_CONCEPT", "com-eq,bs")
        .env("BAYES_WELFARE_SENSE", "max")
        .output()
        .unwrap();
    assert_eq!(flags.status.code(), Some(0));
    assert_eq!(flags.stdout, env.stdout);
}

#[test]
fn csv_output_is_tidy() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig2.csv");
    let out = run(&["reproduce", "figure2", "--eps", "0.1,0.01", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# run_config={"));
    assert_eq!(lines.next(), Some("subject,metric,value,note"));
    assert_eq!(lines.next(), Some("run,exit_code,0,ok"));
    assert!(lines.count() > 4);
}

#[test]
fn generated_games_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("priority.json");
    let gen = run(&["generate", "--recipe", "priority:n=4", "--out", path.to_str().unwrap()]);
    assert_eq!(gen.status.code(), Some(0));
    assert!(Path::new(&path).exists());
    let from_file = run(&["validate", "--game", path.to_str().unwrap()]);
    let from_recipe = run(&["validate", "--recipe", "priority:n=4"]);
    assert_eq!(from_file.status.code(), Some(0));
    let (a, b) = (json(&from_file), json(&from_recipe));
    assert_eq!(a["result"]["conditions"], b["result"]["conditions"]);
    assert_eq!(a["result"]["conditions"]["basic"], false);
}
