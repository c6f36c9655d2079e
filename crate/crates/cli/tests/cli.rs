use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn qsde(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsde"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, v.to_string()).unwrap();
    path
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn model() -> Value {
    let alpha: Vec<f64> = (0..8).map(|i| 0.3 - 0.07 * i as f64).collect();
    let row = |k: usize| -> Vec<[f64; 2]> {
        (0..8)
            .map(|i| {
                [
                    0.1 * ((i + k) % 5) as f64 - 0.2,
                    0.05 * ((2 * i + k) % 7) as f64 - 0.15,
                ]
            })
            .collect()
    };
    json!({"n": 3, "n_w": 2, "alpha": alpha, "Lambda": [row(0), row(1)]})
}

fn max_block_diff(a: &Value, b: &Value) -> f64 {
    match (a, b) {
        (Value::Array(x), Value::Array(y)) => {
            assert_eq!(x.len(), y.len());
            x.iter()
                .zip(y)
                .map(|(p, q)| max_block_diff(p, q))
                .fold(0.0, f64::max)
        }
        (Value::Number(x), Value::Number(y)) => (x.as_f64().unwrap() - y.as_f64().unwrap()).abs(),
        (Value::Object(x), Value::Object(y)) => x
            .iter()
            .map(|(k, v)| max_block_diff(v, &y[k]))
            .fold(0.0, f64::max),
        _ => panic!("mismatched documents"),
    }
}

#[test]
fn basis_rejects_single_level() {
    assert_eq!(code(&qsde(&["basis", "--n", "1"])), 2);
}

#[test]
fn basis_document() {
    let out = qsde(&["basis", "--n", "3"]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["s"], 8);
    assert_eq!(doc["lambdas"].as_array().unwrap().len(), 8);
    assert!(doc["f"]
        .as_array()
        .unwrap()
        .contains(&json!([1, 2, 3, 1.0])));
    let d146 = doc["d"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e[0] == 1 && e[1] == 4 && e[2] == 6)
        .unwrap();
    assert!((d146[3].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn pipeline_reproduces_system() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "model.json", &model());
    let sys = dir.path().join("sys.json");
    let report = dir.path().join("report.json");
    let rec = dir.path().join("recovered.json");
    let again = dir.path().join("again.json");
    assert_eq!(
        code(&qsde(&["synthesize", "--model", s(&m), "--out", s(&sys)])),
        0
    );
    assert_eq!(
        code(&qsde(&["check", "--system", s(&sys), "--out", s(&report)])),
        0
    );
    let r = read_json(&report);
    assert_eq!(r["pass"], true);
    assert_eq!(r["conditions"].as_array().unwrap().len(), 5);
    assert_eq!(
        code(&qsde(&["recover", "--system", s(&sys), "--out", s(&rec)])),
        0
    );
    assert_eq!(
        code(&qsde(&[
            "synthesize",
            "--model",
            s(&rec),
            "--out",
            s(&again)
        ])),
        0
    );
    assert!(max_block_diff(&read_json(&sys), &read_json(&again)) <= 1e-8);
    assert!(max_block_diff(&model(), &read_json(&rec)) <= 1e-8);
}

#[test]
fn perturbed_system_fails_check() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "model.json", &model());
    let sys = dir.path().join("sys.json");
    assert_eq!(
        code(&qsde(&["synthesize", "--model", s(&m), "--out", s(&sys)])),
        0
    );
    let mut doc = read_json(&sys);
    let a0 = doc["A0"][0].as_f64().unwrap();
    doc["A0"][0] = json!(a0 + 0.1);
    let bad = write(&dir, "bad.json", &doc);
    let out = qsde(&["check", "--system", s(&bad)]);
    assert_eq!(code(&out), 1);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["pass"], false);
    let first = &r["conditions"][0];
    assert_eq!(first["condition"], "i");
    assert_eq!(first["pass"], false);
    assert!(first["residual"].as_f64().unwrap() > 0.05);
    assert_eq!(r["recovered"], Value::Null);
    assert_eq!(code(&qsde(&["recover", "--system", s(&bad)])), 1);
}

#[test]
fn input_errors() {
    let dir = TempDir::new().unwrap();
    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "{not json").unwrap();
    assert_eq!(code(&qsde(&["check", "--system", s(&garbage)])), 2);
    let short = write(
        &dir,
        "short.json",
        &json!({"n": 2, "n_w": 0, "alpha": [0, 1], "Lambda": []}),
    );
    assert_eq!(code(&qsde(&["synthesize", "--model", s(&short)])), 2);
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&qsde(&["synthesize", "--model", s(&missing)])), 3);
    let m = write(&dir, "model.json", &model());
    let unwritable = dir.path().join("no/such/dir/out.json");
    assert_eq!(
        code(&qsde(&[
            "synthesize",
            "--model",
            s(&m),
            "--out",
            s(&unwritable)
        ])),
        3
    );
}

#[test]
fn verify_is_reproducible() {
    let args = [
        "verify", "--n", "2", "--seed", "42", "--trials", "3", "--nw", "1",
    ];
    let a = qsde(&args);
    let b = qsde(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let report: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report["pass"], true);
    let c = qsde(&[
        "verify", "--n", "2", "--seed", "43", "--trials", "3", "--nw", "1",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn simulate_writes_csv() {
    let dir = TempDir::new().unwrap();
    let sys = write(
        &dir,
        "rot.json",
        &json!({"n": 2, "n_w": 0, "A0": [0, 0, 0], "A": [[0, -2, 0], [2, 0, 0], [0, 0, 0]],
                "B1": [], "B2": [], "C1": [], "C2": []}),
    );
    let out = qsde(&[
        "simulate",
        "--system",
        s(&sys),
        "--x0",
        "1,0,0",
        "--T",
        "1",
        "--dt",
        "0.01",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,x1,x2,x3");
    assert_eq!(lines.len(), 102);
    let last: Vec<f64> = lines[101].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(last[0], 1.0);
    assert!((last[1] - 2f64.cos()).abs() < 1e-7);
    assert!((last[2] - 2f64.sin()).abs() < 1e-7);

    let bad = qsde(&[
        "simulate",
        "--system",
        s(&sys),
        "--x0",
        "1,0",
        "--T",
        "1",
        "--dt",
        "0.01",
    ]);
    assert_eq!(code(&bad), 2);
    let neg = qsde(&[
        "simulate",
        "--system",
        s(&sys),
        "--x0",
        "-1,0,0",
        "--T",
        "1",
        "--dt",
        "-0.1",
    ]);
    assert_eq!(code(&neg), 2);
}
