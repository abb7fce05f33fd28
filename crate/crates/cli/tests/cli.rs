use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn parworks(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parworks"))
        .args(args)
        .env_remove("PARWORKS_NODE_BUDGET")
        .env_remove("PARWORKS_TIME_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

#[test]
fn exact_binary_line_number() {
    let dir = TempDir::new().unwrap();
    let cert = p(&dir, "cert.json");
    let o = parworks(&["exact", "--kind", "hj", "--dim", "1", "--alphabet", "2", "--colors", "2", "-o", &cert]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "2");
    let c = json(Path::new(&cert));
    assert_eq!(c["format"], "parworks/certificate/1");
    assert_eq!(c["value"], 2);
}

#[test]
fn exact_vdw_matches_known_value() {
    let o = parworks(&["exact", "--kind", "vdw", "--side", "3", "--colors", "2", "--workers", "4", "-o", "/dev/null"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "9");
}

#[test]
fn gowers_tower_renders() {
    let o = parworks(&["bound", "--kind", "gowers", "--r", "2", "--m", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "2^(2^(2^(2^(2^12))))");
}

#[test]
fn bound_json_has_form() {
    let o = parworks(&["bound", "--kind", "e", "--n", "2", "--x", "3", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["format"], "parworks/bound/1");
    assert_eq!(v["bound"]["form"], "exact");
    assert_eq!(v["bound"]["value"], "1446");
}

#[test]
fn hj_bound_needs_grid_value_beyond_binary() {
    let o = parworks(&["bound", "--kind", "hj", "--alphabet", "3"]);
    assert_eq!(o.status.code(), Some(3));
    let o = parworks(&["bound", "--kind", "hj", "--alphabet", "3", "--w-atom", "W"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains('W'));
}

#[test]
fn singleton_counterexample_holds() {
    let o = parworks(&["check", "--counterexample", "--m", "3", "--alphabet", "2", "--base", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "no singleton-block subspace monochromatic");
}

#[test]
fn gen_witness_check_round_trip() {
    let dir = TempDir::new().unwrap();
    let (col, wit) = (p(&dir, "col.json"), p(&dir, "wit.json"));
    let o = parworks(&["gen", "--family", "random", "--length", "4", "--alphabet", "3", "--seed", "7", "--dense", "-o", &col]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(Path::new(&col))["format"], "parworks/coloring/1");
    let o = parworks(&["witness", "--find", "subspace", "-i", &col, "-o", &wit]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(Path::new(&wit))["found"], true);
    let o = parworks(&["check", "--witness", &wit, "--coloring", &col]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "valid");
}

#[test]
fn tampered_witness_is_rejected() {
    let dir = TempDir::new().unwrap();
    let (col, wit) = (p(&dir, "col.json"), p(&dir, "wit.json"));
    parworks(&["gen", "--family", "parity", "--length", "4", "-o", &col]);
    assert_eq!(parworks(&["witness", "--find", "subspace", "-i", &col, "-o", &wit]).status.code(), Some(0));
    let mut w = json(Path::new(&wit));
    // A block of one position changes the zero count by one along the line.
    let mut block = w["subspace"]["blocks"][0].as_array().unwrap().clone();
    assert!(block.len() >= 2);
    let moved = block.pop().unwrap().as_u64().unwrap();
    w["subspace"]["blocks"][0] = block.into();
    w["subspace"]["fixed"][moved.to_string()] = 1.into();
    std::fs::write(&wit, w.to_string()).unwrap();
    let o = parworks(&["check", "--witness", &wit, "--coloring", &col]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}

#[test]
fn par_witness_round_trip() {
    let dir = TempDir::new().unwrap();
    let (col, wit) = (p(&dir, "col.json"), p(&dir, "wit.json"));
    parworks(&["gen", "--family", "random", "--length", "5", "--seed", "3", "-o", &col]);
    let o = parworks(&["witness", "--find", "par", "--size", "2", "-i", &col, "-o", &wit]);
    assert_eq!(o.status.code(), Some(0));
    let o = parworks(&["check", "--witness", &wit, "--coloring", &col]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn subset_coloring_round_trip() {
    let dir = TempDir::new().unwrap();
    let (col, wit) = (p(&dir, "sub.json"), p(&dir, "wit.json"));
    let o = parworks(&["gen", "--subset-levels", "2", "--n", "6", "--seed", "1", "-o", &col]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(Path::new(&col))["format"], "parworks/subset-coloring/1");
    let o = parworks(&["witness", "--find", "homogeneous", "--target", "3", "-i", &col, "-o", &wit]);
    assert_eq!(o.status.code(), Some(0));
    let o = parworks(&["check", "--witness", &wit, "--coloring", &col]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn invariance_check() {
    let dir = TempDir::new().unwrap();
    let col = p(&dir, "col.json");
    parworks(&["gen", "--family", "parity", "--length", "3", "--alphabet", "3", "-o", &col]);
    assert_eq!(parworks(&["check", "--invariant", "--coloring", &col]).status.code(), Some(0));
    parworks(&["gen", "--family", "random", "--length", "3", "--alphabet", "3", "--seed", "2", "-o", &col]);
    assert_eq!(parworks(&["check", "--invariant", "--coloring", &col]).status.code(), Some(1));
}

#[test]
fn failed_pipeline_exits_one_with_trace() {
    let dir = TempDir::new().unwrap();
    let trace = p(&dir, "trace.json");
    let o = parworks(&[
        "witness", "--find", "hj", "--family", "random", "--length", "7", "--seed", "1", "--n1", "3", "--sizes", "6,7",
        "--trace", &trace,
    ]);
    assert_eq!(o.status.code(), Some(1));
    let out: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(out["found"], false);
    assert_eq!(json(Path::new(&trace))["format"], "parworks/trace/1");
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(parworks(&["exact", "--kind", "nope"]).status.code(), Some(3));
    assert_eq!(parworks(&["witness", "--find", "subspace"]).status.code(), Some(3));
    assert_eq!(parworks(&["check", "--witness", "/nonexistent", "--coloring", "/nonexistent"]).status.code(), Some(3));
    assert_eq!(parworks(&["--help"]).status.code(), Some(0));
}

#[test]
fn budget_exhaustion_then_resume() {
    let dir = TempDir::new().unwrap();
    let (journal, cert) = (p(&dir, "journal.jsonl"), p(&dir, "cert.json"));
    let args = ["exact", "--kind", "vdw", "--side", "3", "--colors", "2", "--prefix-depth", "4", "--checkpoint", &journal];
    let mut interrupted = 0;
    let last = loop {
        let mut a = args.to_vec();
        a.extend(["--node-budget", "40", "-o", &cert]);
        let o = parworks(&a);
        if o.status.code() != Some(2) {
            break o;
        }
        interrupted += 1;
        assert!(interrupted < 10_000, "no progress across resumes");
    };
    assert!(interrupted > 0);
    assert_eq!(last.status.code(), Some(0));
    assert_eq!(stdout(&last).trim(), "9");

    let fresh = p(&dir, "fresh.json");
    let o = parworks(&["exact", "--kind", "vdw", "--side", "3", "--colors", "2", "--prefix-depth", "4", "-o", &fresh]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(Path::new(&cert)), json(Path::new(&fresh)));
}

#[test]
fn node_budget_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_parworks"))
        .args(["exact", "--kind", "ramsey", "--target", "3"])
        .env("PARWORKS_NODE_BUDGET", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
