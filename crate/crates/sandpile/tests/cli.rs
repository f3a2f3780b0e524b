//! Black-box tests of the command-line interface.

use std::process::{Command, Output};

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sandpile"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> serde_json::Value {
    let out = run(args);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn stabilize_text() {
    let out = run(&["stabilize", "-g", &data("fig1.sg"), "-c", "4,6,4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("stable: 3,1,4"));
    assert!(text.contains("script:"));
}

#[test]
fn group_json() {
    let v = json(&["group", "-g", &data("fig1.sg"), "--json"]);
    assert_eq!(v["order"], "21");
    assert_eq!(v["invariant_factors"], serde_json::json!(["1", "1", "21"]));
    assert_eq!(v["identity"], serde_json::json!([3, 1, 4]));
}

#[test]
fn burning_text() {
    let text = stdout(&run(&["burning", "-g", &data("fig1.sg")]));
    assert!(text.contains("burning configuration: 0,0,3"));
    assert!(text.contains("burning script: 2,1,2"));
}

#[test]
fn gb_minimal_text() {
    let text = stdout(&run(&["gb", "-g", &data("ex45.sg"), "--minimal"]));
    assert!(text.contains("v2^2 - v1"));
    assert!(text.contains("v2*v3^2 - 1"));
}

#[test]
fn hilbert_text() {
    let text = stdout(&run(&["hilbert", "-g", &data("fig1.sg")]));
    assert!(text.contains("h-vector: 1,3,6,7,4"));
    assert!(text.contains("postulation: 4"));
}

#[test]
fn tutte_text() {
    let text = stdout(&run(&["tutte", "-g", &data("diamond.sg")]));
    assert!(text.contains("T(1,1) = 8"));
    assert!(text.contains("Merino identity holds: true"));
}

#[test]
fn divisor_actions() {
    let d = data("diamond.sg");
    let v = json(&["divisor", "-g", &d, "-d", "1,0,2,1", "--json", "linsys"]);
    assert_eq!(v["size"], 4);
    let v = json(&["divisor", "-g", &d, "-d", "1,0,2,1", "--json", "rank"]);
    assert_eq!(v["rank"], 2);
    let v = json(&["divisor", "-g", &d, "-d", "1,0,2,1", "--json", "rr"]);
    assert_eq!(v["residual"], 0);
    let v = json(&["divisor", "-g", &d, "-d", "1,0,2,1", "--json", "equiv", "2,2,0,0"]);
    assert_eq!(v["equivalent"], true);
    let v = json(&["divisor", "-g", &d, "-d", "1,0,2,1", "--json", "equiv", "0,0,0,4"]);
    assert_eq!(v["equivalent"], false);
}

#[test]
fn betti_json() {
    let v = json(&["betti", "-g", &data("diamond.sg"), "--json"]);
    assert_eq!(v["coarse"], serde_json::json!([6, 9, 4]));
    let top: Vec<&str> = v["graded"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["i"] == 3)
        .map(|e| e["degree_vector"].as_str().unwrap())
        .collect();
    assert_eq!(top, vec!["0122", "0212", "1022", "1202"]);
}

#[test]
fn conjecture_text() {
    let text = stdout(&run(&["conjecture", "-g", &data("diamond.sg")]));
    assert!(text.contains("conjecture holds: true"));
}

#[test]
fn classify_json() {
    let v = json(&["classify", "-g", &data("fig8.sg"), "--json"]);
    assert_eq!(v["gorenstein"], true);
    assert_eq!(v["complete_intersection"], false);
    assert_eq!(v["loopy_tree"], serde_json::Value::Null);
    assert_eq!(v["h_vector"], serde_json::json!([1, 3, 1]));
}

#[test]
fn lattice2graph_text() {
    let text = stdout(&run(&["lattice2graph", "-m", &data("diag23.mat")]));
    assert!(text.starts_with("sink "));
    assert!(text.contains("edge "));
}

#[test]
fn zeros_ok() {
    let out = run(&["zeros", "-g", &data("diamond.sg"), "--tol", "1e-9"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("max residual"));
}

#[test]
fn json_outputs_are_deterministic() {
    for threads in ["1", "4"] {
        let a = run(&["betti", "-g", &data("diamond.sg"), "--json", "--threads", threads]);
        let b = run(&["betti", "-g", &data("diamond.sg"), "--json", "--threads", threads]);
        assert_eq!(a.stdout, b.stdout);
    }
    let a = run(&["betti", "-g", &data("diamond.sg"), "--json", "--threads", "1"]);
    let b = run(&["betti", "-g", &data("diamond.sg"), "--json", "--threads", "4"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["nosuchcommand"]).status.code(), Some(64));
    assert_eq!(run(&["group", "-g", "/does/not/exist.sg"]).status.code(), Some(2));
    // cap exceeded is distinguishable from invalid input
    let out = run(&["group", "-g", &data("fig1.sg"), "--elements", "--max-order", "5"]);
    assert_eq!(out.status.code(), Some(3));
    // bad configuration length is a validation error
    let out = run(&["stabilize", "-g", &data("fig1.sg"), "-c", "1,2"]);
    assert_eq!(out.status.code(), Some(2));
}
