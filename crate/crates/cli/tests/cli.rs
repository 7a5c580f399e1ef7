use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn redci(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_redci")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const MARGINALS: &str = "x;y;z;verdict\nX;Y;;dep\nX;Z;;indep\nY;Z;;dep\n";

#[test]
fn closure_reports_forced_dependences() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "l.csv", MARGINALS);
    let v = json(&redci(&["closure", "--in", &input, "--query", "X;Y;Z", "--query", "X;Z;Y"]));
    let q = v["queries"].as_array().unwrap();
    assert_eq!(q[0]["status"], "dependent");
    assert!(!q[0]["derivation"].is_null());
    assert_eq!(q[1]["status"], "unknown");
}

#[test]
fn classify_splits_collider_dependences() {
    let dir = tempfile::tempdir().unwrap();
    let l = write(dir.path(), "l.csv", "x;y;z;verdict\nX1;Y;;dep\nX2;Y;;dep\nX1;X2;;indep\n");
    let g = write(
        dir.path(),
        "g.json",
        r#"{"nodes":["X1","X2","Y"],"edges":[["X1","Y"],["X2","Y"]],"directed":true}"#,
    );
    let a = json(&redci(&["classify", "--graph", &g, "--statements", &l, "--target", "X1;Y;X2"]));
    assert_eq!(a["class"], "graphoid-redundant");
    let b = json(&redci(&["classify", "--graph", &g, "--statements", &l, "--target", "X1;X2;Y"]));
    assert_eq!(b["class"], "purely-graphical");
}

#[test]
fn synth_then_discover_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    let graph = dir.path().join("g.json");
    let out = format!("{},{}", data.display(), graph.display());
    let s = redci(&["synth", "--kind", "tree", "--n", "4", "--samples", "2000", "--seed", "3", "--out", &out]);
    assert!(s.status.success(), "{}", String::from_utf8_lossy(&s.stderr));
    assert!(data.exists() && graph.exists());

    let learned = dir.path().join("learned.json");
    let d = redci(&[
        "discover",
        "--algo",
        "mmd-tree",
        "--oracle",
        graph.to_str().unwrap(),
        "--out",
        learned.to_str().unwrap(),
    ]);
    assert!(d.status.success(), "{}", String::from_utf8_lossy(&d.stderr));
    let truth: Value = serde_json::from_str(&fs::read_to_string(&graph).unwrap()).unwrap();
    let found: Value = serde_json::from_str(&fs::read_to_string(&learned).unwrap()).unwrap();
    let edges = |v: &Value| {
        let mut e: Vec<(String, String)> = serde_json::from_value::<Vec<(String, String)>>(v["edges"].clone())
            .unwrap()
            .into_iter()
            .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
            .collect();
        e.sort();
        e
    };
    assert_eq!(found["tie"], false);
    assert_eq!(edges(&truth), edges(&found["graphs"][0]));

    let from_data = redci(&["discover", "--algo", "tree-pc", "--oracle", data.to_str().unwrap()]);
    assert!(from_data.status.success(), "{}", String::from_utf8_lossy(&from_data.stderr));
}

#[test]
fn experiment_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let r = redci(&[
        "experiment",
        "flip-injection",
        "--trials",
        "5",
        "--n",
        "4",
        "--out",
        out.to_str().unwrap(),
        "--check",
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let summary: Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], true);
    assert!(summary["hash"].as_str().unwrap().starts_with("sha256:"));
    assert!(fs::read_to_string(out.join("results.csv")).unwrap().lines().count() > 1);
}

#[test]
fn bad_input_fails_cleanly() {
    let r = redci(&["closure", "--in", "/nonexistent/file.csv"]);
    assert!(!r.status.success());
    assert!(!r.stderr.is_empty());
    let r = redci(&["experiment", "no-such-experiment", "--out", "/tmp/x"]);
    assert!(!r.status.success());
}
