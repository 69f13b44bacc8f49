use std::process::{Command, Output};

use serde_json::{json, Value};

fn divcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divcalc")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn error_of(out: &Output) -> (i32, Value) {
    let err: Value = serde_json::from_slice(&out.stderr).expect("json on stderr");
    (out.status.code().unwrap(), err["error"].clone())
}

#[test]
fn divdiff_example() {
    let out = divcalc(&["divdiff", "--map", "f(x)=x^2", "--order", "2", "--v", "2;1;0", "--s", "0,1,3", "--ring", "rational"]);
    let v = stdout_json(&out);
    assert_eq!(v["divdiff"], json!(["1"]));
    assert_eq!(v["sj"], json!([["4"], ["5"], ["1"]]));
    assert_eq!(v["points"], json!([["2"], ["3"], ["5"]]));
}

#[test]
fn jet_in_characteristic_two() {
    let out = divcalc(&["jet", "--map", "f(x)=x^3", "--order", "2", "--s", "0,0,0", "--v", "1;1;1", "--ring", "zmod:2"]);
    assert_eq!(stdout_json(&out), json!({"jet": [["1"], ["1"], ["0"]]}));
}

#[test]
fn embed_example() {
    let out = divcalc(&["embed", "--s", "0,1,3", "--ring", "rational"]);
    assert_eq!(
        stdout_json(&out),
        json!({"t": {"1": "2", "2": "1", "1,2": "1"}, "minpoly": ["0", "3", "-4", "1"], "match": true})
    );
}

#[test]
fn taylor_and_cubic() {
    let out = divcalc(&["taylor", "--map", "f(x)=x^3", "--at", "1", "--dir", "1", "--order", "3", "--ring", "zmod:3"]);
    assert_eq!(stdout_json(&out)["coeffs"], json!([["1"], ["0"], ["0"], ["1"]]));
    let out = divcalc(&["cubic", "--map", "f(x)=x^2", "--t", "t1=1,t2=2,t12=1", "--x", "2;1;0;0"]);
    assert_eq!(stdout_json(&out)["components"], json!({"": ["4"], "1": ["5"], "2": ["0"], "1,2": ["1"]}));
    // singular t falls back to scalar extension
    let out = divcalc(&["cubic", "--map", "f(x)=x^2", "--x", "3;1"]);
    let v = stdout_json(&out);
    assert_eq!(v["method"], "ring");
    assert_eq!(v["components"], json!({"": ["9"], "1": ["6"]}));
    let out = divcalc(&["cubic", "--map", "f(x)=x^2", "--x", "3;1", "--method", "fd"]);
    assert_eq!(error_of(&out).0, 2);
}

#[test]
fn map_from_file() {
    let dir = std::env::temp_dir().join(format!("divcalc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("square.map");
    std::fs::write(&path, "f(x) = x^2\n").unwrap();
    let out = divcalc(&["divdiff", "--map", path.to_str().unwrap(), "--order", "1", "--v", "2;1", "--s", "0,3"]);
    assert_eq!(stdout_json(&out)["divdiff"], json!(["7"]));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    let (code, err) = error_of(&divcalc(&["divdiff", "--map", "f(x)=x +", "--order", "1", "--v", "1;1", "--s", "0,1"]));
    assert_eq!((code, err["kind"].as_str().unwrap()), (1, "ParseError"));
    assert_eq!(err["offset"], 8);
    let (code, err) = error_of(&divcalc(&["divdiff", "--map", "f(x)=1/x", "--order", "1", "--v", "0;1", "--s", "0,1"]));
    assert_eq!((code, err["kind"].as_str().unwrap()), (2, "DomainError"));
    assert_eq!(err["subexpr"], "x");
    let (code, err) = error_of(&divcalc(&["divdiff", "--map", "f(x)=x", "--order", "1", "--v", "0;1", "--s", "0,0"]));
    assert_eq!((code, err["kind"].as_str().unwrap()), (2, "NonsingularRequired"));
    let (code, _) = error_of(&divcalc(&["divdiff", "--map", "f(x)=x", "--order", "2", "--v", "0;1", "--s", "0,1"]));
    assert_eq!(code, 3);
    let (code, _) = error_of(&divcalc(&["jet", "--map", "f(x)=x", "--order", "1"]));
    assert_eq!(code, 3);
    let (code, err) = error_of(&divcalc(&["verify", "--suite", "unknown"]));
    assert_eq!((code, err["kind"].as_str().unwrap()), (3, "UnknownSuite"));
    let (code, _) = error_of(&divcalc(&["jet", "--map", "f(x)=x", "--order", "1", "--s", "0,0", "--v", "1;1", "--ring", "zmod:1"]));
    assert_eq!(code, 3);
}

#[test]
fn verify_reports() {
    let out = divcalc(&["verify", "--suite", "chain-rule", "--ring", "zmod:7", "--trials", "200", "--seed", "42", "--max-order", "3"]);
    let v = stdout_json(&out);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["passed"].as_u64().unwrap() + v["skipped"].as_u64().unwrap(), 200);
    let out = divcalc(&["verify", "--suite", "sign-determination", "--ring", "rational", "--trials", "50"]);
    let v = stdout_json(&out);
    assert_eq!(v["signs"], json!({"1": "+1", "2": "+1", "3": "+1"}));
}

#[test]
fn output_independent_of_worker_count() {
    let args = ["verify", "--suite", "limited-expansion", "--ring", "zmod:5", "--trials", "60", "--seed", "3"];
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_divcalc")).args(args).env("RAYON_NUM_THREADS", threads).output().unwrap().stdout
    };
    let one = run("1");
    assert!(!one.is_empty());
    assert_eq!(one, run("4"));
    assert_eq!(one, run("1"));
}

#[test]
fn ring_tables() {
    let v = stdout_json(&divcalc(&["ring-table", "--ring", "zmod:4"]));
    assert_eq!(v["inverse"], json!({"1": "1", "3": "3"}));
    assert_eq!(v["mul"][2], json!(["0", "2", "0", "2"]));
    let v = stdout_json(&divcalc(&["ring-table", "--ring", "rational", "--s", "0,1,3"]));
    // c_1 · c_1 = X² = c_2 + c_1 for s = (0, 1, 3)
    assert_eq!(v["mul"][1][1], json!(["0", "1", "1"]));
    let v = stdout_json(&divcalc(&["ring-table", "--ring", "rational", "--t", "t1=2,t2=3,t12=5"]));
    let x2_x12 = v["mul"].as_array().unwrap().iter().find(|e| e["left"] == "2" && e["right"] == "1,2").unwrap();
    assert_eq!(x2_x12["product"], json!({"1,2": "13"}));
    let (code, _) = error_of(&divcalc(&["ring-table", "--ring", "rational"]));
    assert_eq!(code, 3);
}
