use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn csc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csc")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn extract_then_decode_omega() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "omega.json", r#"{"kind": "poset", "order": {"rule": "omega"}}"#);
    let cert = dir.path().join("cert.json");
    let o = csc(&["extract", "--pipeline", "gs", "--instance", s(&inst), "--k", "10", "--out", s(&cert)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let body: serde_json::Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(body["tag"], "final-segment");
    assert_eq!(body["report"]["passed"], true);

    let o = csc(&["decode", "--instance", s(&inst), "--cert", s(&cert)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let d: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(d["validated"], true);
    assert_eq!(d["direction"], "ascending");
}

#[test]
fn decoding_against_the_wrong_instance_fails() {
    let dir = TempDir::new().unwrap();
    let omega = write(&dir, "omega.json", r#"{"kind": "poset", "order": {"rule": "omega"}}"#);
    let anti = write(&dir, "anti.json", r#"{"kind": "poset", "order": {"rule": "reverse-omega"}}"#);
    let cert = dir.path().join("cert.json");
    assert!(csc(&["extract", "--instance", s(&omega), "--k", "6", "--out", s(&cert)]).status.success());
    let o = csc(&["decode", "--instance", s(&anti), "--cert", s(&cert)]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("break"), "{}", stderr(&o));
}

#[test]
fn k_above_n_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "omega.json", r#"{"kind": "poset", "order": {"rule": "omega"}}"#);
    let o = csc(&["extract", "--instance", s(&inst), "--n", "8", "--k", "9"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn instance_errors_name_the_problem() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", r#"{"kind": "poset", "order": {"rule": "table", "leq": [[1,1,0],[0,1,1],[0,0,1]]}}"#);
    let o = csc(&["classify", "--instance", s(&bad)]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("not transitive at (0, 1, 2)"), "{}", stderr(&o));

    let unknown = write(&dir, "unknown.json", r#"{"kind": "lattice"}"#);
    let o = csc(&["encode", "--instance", s(&unknown)]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("parse error"), "{}", stderr(&o));
}

#[test]
fn classify_and_encode() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "anti.json", r#"{"kind": "poset", "order": {"rule": "antichain"}}"#);
    let o = csc(&["classify", "--instance", s(&inst), "--n", "8", "--m", "8"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["recognition"]["confirmed"], serde_json::json!(["discrete"]));

    let o = csc(&["encode", "--instance", s(&inst), "--n", "4"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["generators"][2]["members"], serde_json::json!([2]));
}

#[test]
fn injection_ranges() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "double.json", r#"{"kind": "injection", "f": {"rule": "double"}, "budget": 32}"#);
    let o = csc(&["decode", "--instance", s(&inst), "--w", "6"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let inside: Vec<u64> =
        v["decisions"].as_array().unwrap().iter().filter(|d| d["in_range"] == true).map(|d| d["x"].as_u64().unwrap()).collect();
    assert_eq!(inside, vec![0, 2, 4]);
}

#[test]
fn priority_log_and_audit() {
    let dir = TempDir::new().unwrap();
    let table = write(&dir, "adv.txt", "# Φ_0(3) = 1, Φ_1(3) = ⟨13⟩\n0 - 3 1\n1 - 3 92\n");
    let o = csc(&["simulate-priority", "--stages", "120", "--tables", s(&table), "--audit"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.lines().all(|l| l.starts_with("stage ")));
    assert!(out.contains("stage 93: R_0,1 claims [13] for x = 3"), "{out}");
    let err = stderr(&o);
    assert!(err.contains("0 violations") && err.contains("R_0,1: {\"status\":\"satisfied-on-window-r\""), "{err}");
}

#[test]
fn forcing_tree_output() {
    let o = csc(&["forcing-tree", "--F", "3"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["strings"].as_array().unwrap().len(), 15);
    assert_eq!(v["looks_extendible"], true);

    let dir = TempDir::new().unwrap();
    let table = write(&dir, "block.txt", "0 - 0 1\n1 0 1 0\n");
    let o = csc(&["forcing-tree", "--table", s(&table), "--F", "1", "--J", "1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["strings"], serde_json::json!(["-"]));
    assert_eq!(v["looks_extendible"], false);
}

#[test]
fn selftest_passes() {
    let o = csc(&["selftest"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}
