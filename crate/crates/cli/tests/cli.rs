use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_miniversal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON on stdout")
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn pattern_of_identity() {
    let o = run(&["pattern", "--structure", "G1 G1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("1 0  +  0 0\n0 1     * 0\n"), "{out}");
    assert!(out.contains("codimension: 1"));
}

#[test]
fn pattern_of_zero_scalar() {
    let o = run(&["pattern", "--structure", "J1"]);
    assert!(stdout(&o).contains("0  +  *\n"));
}

#[test]
fn pattern_of_h_and_gamma() {
    let o = run(&["pattern", "--structure", "H1(0.5,0) G1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["pattern"]["stars"], serde_json::json!([[2, 1]]));
    assert_eq!(v["codimension"], 1);
}

#[test]
fn structure_from_json_file() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "s.json", r#"{"blocks":[{"kind":"J0","k":1},{"kind":"J0","k":2}]}"#);
    let o = run(&["codim", "--structure", &path]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "4");
}

#[test]
fn codimension_of_jordan_pair() {
    let o = run(&["codim", "--structure", "J2 J1"]);
    assert_eq!(stdout(&o).trim(), "4");
}

#[test]
fn examples_match_the_fixture() {
    let o = run(&["examples"]);
    assert_eq!(o.status.code(), Some(0));
    let fixture = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/small_forms.txt")).unwrap();
    assert_eq!(stdout(&o), fixture);
}

#[test]
fn every_three_by_three_form_verifies() {
    for s in [
        "J1 J1 J1",
        "G1 J1 J1",
        "G1 G1 J1",
        "G1 G1 G1",
        "H1(-1,0) J1",
        "H1(2,0) J1",
        "J2 J1",
        "G2 J1",
        "H1(-1,0) G1",
        "H1(3,0) G1",
        "G2 G1",
        "J3",
        "G3",
    ] {
        let o = run(&["verify", "--structure", s]);
        assert_eq!(o.status.code(), Some(0), "{s}");
        assert!(stdout(&o).contains("DirectSum"));
    }
}

#[test]
fn corrupted_pattern_fails_verification() {
    let dir = TempDir::new().unwrap();
    // J2 J1 has stars (2,1), (2,3), (3,1), (3,3); drop (3,3)
    let path = write(&dir, "p.json", r#"{"rows":3,"cols":3,"stars":[[2,1],[2,3],[3,1]]}"#);
    let o = run(&["verify", "--structure", "J2 J1", "--pattern", &path, "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["verdict"], "NotSpanning");
}

#[test]
fn sweep_is_deterministic() {
    let args = ["verify", "--sweep", "6", "--seed", "42", "--count", "120", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a).as_array().unwrap().len(), 120);
}

#[test]
fn reduce_zero_perturbation() {
    let dir = TempDir::new().unwrap();
    let e = write(&dir, "e.txt", "2 2\n0 0\n0 0\n");
    let o = run(&["reduce", "--structure", "G1 G1", "--perturbation", &e, "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["result"]["S"], "2 2\n1.0+0.0j 0.0+0.0j\n0.0+0.0j 1.0+0.0j\n");
    assert_eq!(v["result"]["trace"]["iterations"], 0);
}

#[test]
fn reduce_small_perturbation() {
    let dir = TempDir::new().unwrap();
    let e = write(
        &dir,
        "e.txt",
        "2 2\n3e-7+1e-7j -4e-7\n2e-7 5e-7-2e-7j\n",
    );
    let trace = dir.path().join("trace.jsonl");
    let o = run(&[
        "reduce",
        "--structure",
        "G1 G1",
        "--perturbation",
        &e,
        "--format",
        "json",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert!(v["result"]["trace"]["iterations"].as_u64().unwrap() <= 6);
    assert!(v["result"]["residual"].as_f64().unwrap() < 1e-12);
    let lines = fs::read_to_string(trace).unwrap();
    assert!(lines.lines().count() >= 2);
    for l in lines.lines() {
        let rec: Value = serde_json::from_str(l).unwrap();
        assert!(rec["masked_norm"].is_number());
    }
}

#[test]
fn reduce_large_perturbation_reports_or_fails_cleanly() {
    let dir = TempDir::new().unwrap();
    let e = write(&dir, "e.txt", "2 2\n5 -4\n6 3\n");
    let trace = dir.path().join("trace.jsonl");
    let o = run(&[
        "reduce",
        "--structure",
        "G1 G1",
        "--perturbation",
        &e,
        "--trace",
        trace.to_str().unwrap(),
        "--max-iter",
        "40",
    ]);
    match o.status.code() {
        Some(0) => assert!(stdout(&o).contains("outside the certified basin")),
        Some(1) => assert!(trace.exists()),
        other => panic!("unexpected exit {other:?}"),
    }
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(run(&["pattern", "--structure", "H1(1,0)"]).status.code(), Some(2));
    assert_eq!(run(&["pattern", "--structure", "Q3"]).status.code(), Some(2));
    let dir = TempDir::new().unwrap();
    let e = write(&dir, "e.txt", "1 1\n0\n");
    let o = run(&["reduce", "--structure", "G1 G1", "--perturbation", &e]);
    assert_eq!(o.status.code(), Some(2));
    let bad = write(&dir, "bad.txt", "2 2\n1 2\n");
    assert_eq!(run(&["reduce", "--structure", "G1 G1", "--perturbation", &bad]).status.code(), Some(2));
    assert_eq!(run(&["verify"]).status.code(), Some(2));
}

#[test]
fn split_of_gamma_two() {
    let o = run(&["split", "--structure", "G2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["symmetric"], "2 2\n0.0+0.0j 0.0+0.0j\n0.0+0.0j 1.0+0.0j\n");
    assert_eq!(v["skew"], "2 2\n0.0+0.0j -1.0+0.0j\n1.0+0.0j 0.0+0.0j\n");
}

#[test]
fn greedy_matches_codimension() {
    let o = run(&["greedy", "--structure", "H1(2,0) H1(0.5,0)", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["stars"], v["codimension"]);
}

#[test]
fn orientation_flags_keep_the_count() {
    let base = json(&run(&["pattern", "--structure", "G3 J1", "--format", "json"]));
    let alt = json(&run(&[
        "pattern",
        "--structure",
        "G3 J1",
        "--format",
        "json",
        "--row-lines",
        "--last-row",
    ]));
    assert_eq!(base["codimension"], alt["codimension"]);
    assert_ne!(base["pattern"], alt["pattern"]);
}
