//! End-to-end runs of the `ionet` binary on the fixture corpus.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> String {
    root().join("fixtures").join(name).display().to_string()
}

fn ionet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ionet"))
        .args(args)
        .env_remove("IONET_BUDGET")
        .output()
        .expect("failed to run ionet")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Runs with `--json`, checks the exit code and validates the output.
fn json_run(args: &[&str], schema: &str, code: i32) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let out = ionet(&all);
    assert_eq!(
        out.status.code(),
        Some(code),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let value: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let schema_text = std::fs::read_to_string(root().join("schemas").join(schema)).unwrap();
    let schema: Value = serde_json::from_str(&schema_text).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).unwrap();
    if let Err(errors) = compiled.validate(&value) {
        let msgs: Vec<String> = errors.map(|e| e.to_string()).collect();
        panic!("{args:?} does not match {}: {msgs:?}\n{value}", schema_text.len());
    }
    value
}

#[test]
fn classify_reports_the_figure_classes() {
    let v = json_run(&["classify", &fixture("fig1.net")], "classify.schema.json", 0);
    assert_eq!(v["bimo"], true);
    assert_eq!(v["ordinary"], true);
    let v = json_run(&["classify", &fixture("fig7.net")], "classify.schema.json", 0);
    assert_eq!(v["io"], true);
    assert_eq!(v["class"], "ord-IO");
}

#[test]
fn empty_net_has_every_flag() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.net");
    std::fs::write(&path, "net empty\n").unwrap();
    let v = json_run(&["classify", path.to_str().unwrap()], "classify.schema.json", 0);
    for flag in ["ordinary", "conservative", "bimo", "bio", "imo", "io"] {
        assert_eq!(v[flag], true, "{flag}");
    }
}

#[test]
fn live_verdicts_on_the_non_monotone_net() {
    let fig6 = fixture("fig6.net");
    let v = json_run(&["live", &fig6, "--marking", "2,0,0,0,0"], "verdict.schema.json", 0);
    assert_eq!(v["verdict"], "live");
    let v = json_run(&["live", &fig6, "--marking", "1,0,0,0,0"], "verdict.schema.json", 0);
    assert_eq!(v["verdict"], "nonlive");
    assert!(!v["witness"]["t_dead"].as_array().unwrap().is_empty());
}

#[test]
fn marking_of_wrong_arity_is_a_usage_error() {
    let out = ionet(&["live", &fixture("fig6.net"), "--marking", "1,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("5 places"));
}

#[test]
fn unreadable_input_is_invalid() {
    assert_eq!(ionet(&["classify", "/nonexistent.net"]).status.code(), Some(2));
    assert_eq!(ionet(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(ionet(&["live", &fixture("fig6.net"), "--budget", "0"]).status.code(), Some(2));
}

#[test]
fn budget_exceedance_exits_with_three_and_partial_stats() {
    let v = json_run(
        &["live", &fixture("fig6.net"), "--marking", "2,0,0,0,0", "--budget", "3"],
        "verdict.schema.json",
        3,
    );
    assert_eq!(v["verdict"], "budget_exceeded");
    assert!(v["stats"]["configs_explored"].as_u64().unwrap() > 3);
}

#[test]
fn budget_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_ionet"))
        .args(["live", &fixture("fig6.net"), "--marking", "2,0,0,0,0"])
        .env("IONET_BUDGET", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn slp_on_the_figures() {
    let v = json_run(&["slp", &fixture("fig1.net")], "verdict.schema.json", 0);
    assert_eq!(v["verdict"], "not_structurally_live");
    let v = json_run(&["slp", &fixture("fig9.net")], "verdict.schema.json", 0);
    assert_eq!(v["verdict"], "structurally_live");
    let cert = v["certificate"].as_array().unwrap();
    assert!(cert.iter().any(|c| c.as_u64().unwrap() > 1));
}

#[test]
fn candidate_budget_is_reported() {
    let v = json_run(
        &["slp", &fixture("fig1.net"), "--candidates", "10"],
        "verdict.schema.json",
        3,
    );
    assert_eq!(v["verdict"], "budget_exceeded");
}

#[test]
fn witness_on_the_replayed_marking() {
    let v = json_run(
        &["witness", &fixture("fig5.net"), "--marking", "0,1,1,0,0,4,4"],
        "witness.schema.json",
        0,
    );
    assert_eq!(v["found"], true);
    let dead: Vec<&str> = v["witness"]["t_dead"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t.as_str().unwrap())
        .collect();
    for t in ["t1", "t6", "t7"] {
        assert!(dead.contains(&t), "{dead:?}");
    }
    assert_eq!(v["conditions"]["cond3"], "pass");
}

#[test]
fn truncate_clamps_large_values() {
    let v = json_run(
        &["truncate", &fixture("fig7.net"), "--marking", "100,0,1,0,0,1"],
        "truncate.schema.json",
        0,
    );
    let m: Vec<u64> = v["marking"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    assert!(m[0] < 100);
    assert_eq!(&m[1..], &[0, 1, 0, 0, 1]);
}

#[test]
fn ordinarize_prints_an_ordinary_net() {
    let out = ionet(&["ordinarize", &fixture("fig8_left.net")]);
    assert!(out.status.success());
    let (net, _) = ionet_core::parse_net(&stdout(&out)).unwrap();
    assert!(net.is_ordinary());
    assert_eq!(net.num_places(), 4);
}

#[test]
fn lba_stages_and_reduction_check() {
    let spec = fixture("lba/second_is_b.lba");
    for stage in ["base", "split", "free", "closed"] {
        let out = ionet(&["lba", &spec, "ab", "--stage", stage]);
        assert!(out.status.success(), "{stage}");
        let (net, m0) = ionet_core::parse_net(&stdout(&out)).unwrap();
        assert!(m0.is_some());
        if stage != "base" {
            assert!(ionet_core::classify(&net).io);
        }
    }
    let v = json_run(&["check-reduction", &spec, "ab"], "reduction.schema.json", 0);
    assert_eq!(v["accepted"], true);
    assert_eq!(v["agree"], true);
    assert_eq!(ionet(&["lba", &spec, "abc!"]).status.code(), Some(2));
}

#[test]
fn gen_is_deterministic_and_classed() {
    let args = ["gen", "--class", "io", "--places", "4", "--seed", "7"];
    let a = ionet(&args);
    let b = ionet(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let (net, _) = ionet_core::parse_net(&stdout(&a)).unwrap();
    assert!(ionet_core::classify(&net).io);
    let other = ionet(&["gen", "--class", "io", "--places", "4", "--seed", "8"]);
    assert_ne!(a.stdout, other.stdout);
}
