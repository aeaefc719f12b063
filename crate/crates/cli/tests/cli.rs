use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn isoper(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_isoper")).args(args).output().expect("binary runs");
    let code = out.status.code().expect("exit code");
    let payload = if out.stdout.is_empty() { Value::Null } else { serde_json::from_slice(&out.stdout).expect("JSON on stdout") };
    (code, payload)
}

fn period(dir: &Path, name: &str, res: &[&str]) -> PathBuf {
    let values: Vec<Value> = res.iter().map(|r| serde_json::json!({ "group": "CModZ", "re": r })).collect();
    let p = serde_json::json!({ "genus": res.len() / 2, "group": "CModZ", "values": values });
    let path = dir.join(name);
    fs::write(&path, p.to_string()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, v.to_string()).unwrap();
    path
}

#[test]
fn degree_of_a_third_is_three() {
    let dir = tempfile::tempdir().unwrap();
    let p = period(dir.path(), "p.json", &["1/3", "0", "0", "0"]);
    let (code, out) = isoper(&["degree", "--period", s(&p)]);
    assert_eq!(code, 0);
    assert_eq!(out["degree"], 3);
    assert_eq!(out["schema"], "isoper/degree/v1");
}

#[test]
fn connect_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let p = period(dir.path(), "p.json", &["1/3", "0", "1/5", "0", "0", "1/2"]);
    let (code, d1) = isoper(&["decompose", "--period", s(&p)]);
    assert_eq!(code, 0);
    let (code, d2) = isoper(&["decompose", "--period", s(&p), "--envelope", "1,1,0,0,1,0"]);
    assert_eq!(code, 0);
    let (from, to) = (write(dir.path(), "d1.json", &d1), write(dir.path(), "d2.json", &d2));
    let cert = dir.path().join("cert.json");
    let before = fs::read(&from).unwrap();
    let (code, out) = isoper(&["connect", "--period", s(&p), "--from", s(&from), "--to", s(&to), "--out", s(&cert)]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(fs::read(&from).unwrap(), before);

    let (code, out) = isoper(&["verify-cert", "--period", s(&p), s(&cert)]);
    assert_eq!(code, 0);
    assert_eq!(out["accepted"], true);

    let other = period(dir.path(), "q.json", &["1/3", "0", "1/5", "0", "0", "1/7"]);
    let (code, out) = isoper(&["verify-cert", "--period", s(&other), s(&cert)]);
    assert_eq!(code, 1);
    assert_eq!(out["accepted"], false);
}

#[test]
fn connect_in_genus_two_is_a_precondition_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = period(dir.path(), "p.json", &["1/3", "0", "0", "0"]);
    let (_, d) = isoper(&["decompose", "--period", s(&p)]);
    let d = write(dir.path(), "d.json", &d);
    let (code, _) = isoper(&["connect", "--period", s(&p), "--from", s(&d), "--to", s(&d)]);
    assert_eq!(code, 3);
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"genus\": 2").unwrap();
    assert_eq!(isoper(&["degree", "--period", s(&bad)]).0, 2);
    let p = period(dir.path(), "p.json", &["1/3", "0", "0", "0"]);
    assert_eq!(isoper(&["admissible", "--period", s(&p), "--vector", "1,0"]).0, 2);
}

#[test]
fn haupt_examples() {
    let dir = tempfile::tempdir().unwrap();
    let c = |re: &str, im: &str| serde_json::json!({ "re": { "rat": re, "sqrt2": "0" }, "im": { "rat": im, "sqrt2": "0" } });
    let good = write(dir.path(), "l1.json", &serde_json::json!({ "values": [c("1", "0"), c("0", "1"), c("1", "0"), c("0", "1")] }));
    let (code, out) = isoper(&["haupt", "--lift", s(&good)]);
    assert_eq!(code, 0);
    assert_eq!(out["realizable"], true);
    let bad = write(dir.path(), "l2.json", &serde_json::json!({ "values": [c("1", "0"), c("0", "1"), c("0", "0"), c("0", "0")] }));
    assert_eq!(isoper(&["haupt", "--lift", s(&bad)]).1["realizable"], false);

    let real = period(dir.path(), "p.json", &["1/3", "1/5", "0", "2/7"]);
    let (code, out) = isoper(&["haupt", "--period", s(&real), "--bound", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out["realizable_count"], 0);
}

#[test]
fn seeded_commands_are_deterministic() {
    let a = isoper(&["genus2-branch", "--seed", "5"]);
    assert_eq!(a.0, 0);
    assert_eq!(a.1["info"]["genus"], 2);
    assert_eq!(a, isoper(&["genus2-branch", "--seed", "5"]));

    let b = isoper(&["cyl-degenerate", "--genus", "4", "--seed", "9", "--trials", "5"]);
    assert_eq!(b.0, 0);
    assert_eq!(b.1["runs"].as_array().unwrap().len(), 5);
    assert_eq!(b, isoper(&["cyl-degenerate", "--genus", "4", "--seed", "9", "--trials", "5"]));
    assert_eq!(isoper(&["cyl-degenerate", "--genus", "1"]).0, 3);
}

#[test]
fn orbit_and_graph_commands() {
    let (code, out) = isoper(&["arnold-orbit", "--genus", "2"]);
    assert_eq!(code, 0);
    assert!(out["report"]["count"].as_u64().unwrap() >= 2);

    let dir = tempfile::tempdir().unwrap();
    let p = period(dir.path(), "p.json", &["1/2", "0", "0", "0", "0", "0"]);
    let (code, out) = isoper(&["graph-enum", "--period", s(&p), "--bound", "1", "--max-vertices", "50", "--certify"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out["truncated"], true);
    assert!(out["certified"]["longest"].as_u64().is_some());
}
