use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_threshold-lab"))
        .args(args)
        .env_remove("THRESHOLD_LAB_THREADS")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    })
}

const CANADA: &str = r#"{"classes":[2,8],"shift_minimal":[[1,6]]}"#;
const UNSC: &str = r#"{"quota":39,"class_weights":[7,1],"classes":[5,10]}"#;

#[test]
fn analyze_unsc_and_canada() {
    let out = run(&["analyze", "-"], UNSC);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!((v["weighted"].as_bool(), v["t"].as_u64(), v["r"].as_u64()), (Some(true), Some(2), Some(1)));
    assert_eq!(v["trivial_players"]["vetoers"].as_array().unwrap().len(), 5);

    let v = json(&run(&["analyze", "-"], CANADA));
    assert_eq!(v["weighted"], Value::Bool(false));
    assert_eq!(v["mp"]["m"], "1/2");
    assert_eq!(v["Y"], serde_json::json!([[2, 4], [0, 8]]));
}

#[test]
fn certify_exit_codes() {
    let out = run(&["certify", "-", "--mode", "invariant"], CANADA);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "not_weighted");
    assert_eq!(v["certificate"]["k"], 2);

    let fm = r#"{"classes":[2,2,3],"shift_minimal":[[2,1,0],[1,0,3]]}"#;
    let out = run(&["certify", "-", "--max-k", "3"], fm);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["verdict"], "inconclusive");
    let v = json(&run(&["certify", "-", "--max-k", "4", "--expand"], fm));
    assert_eq!(v["certificate"]["k"], 4);
    assert_eq!(v["transform"]["pre"].as_array().unwrap().len(), 4);

    let v = json(&run(&["certify", "-"], r#"{"quota":4,"weights":[1,1,1,1,1,1,1]}"#));
    assert_eq!(v["verdict"], "weighted");
    assert_eq!(v["player_weights"], serde_json::json!([1, 1, 1, 1, 1, 1, 1]));

    let v = json(&run(&["certify", "-"], r#"{"n":4,"minimal_winning":[[0,1],[2,3]]}"#));
    assert_eq!(v["verdict"], "not_complete");
}

#[test]
fn input_errors_exit_one() {
    let out = run(&["analyze", "-"], "{\"n\": 3,\n \"minimal_winning\": [[0, 1],");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
    assert_eq!(run(&["analyze", "-"], r#"{"n":2,"minimal_winning":[[0],[0,1]]}"#).status.code(), Some(1));
    assert_eq!(run(&["family", "lemma_5_1"], "").status.code(), Some(1));
    assert_eq!(run(&["enumerate", "--n", "5..3"], "").status.code(), Some(1));
    assert_eq!(run(&["convert", "-", "--to", "weighted"], CANADA).status.code(), Some(1));
}

#[test]
fn enumerate_csv() {
    let out = run(&["enumerate", "--n", "6", "--t", "3", "--csv", "-"], "");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "n,CG,WG,N-2T,N-3T\n6,262,256,6,0\n");
    let out = run(&["--threads", "1", "enumerate", "--n", "1..3"], "");
    let v = json(&out);
    let totals: Vec<u64> = v.as_array().unwrap().iter().map(|r| r["total"].as_u64().unwrap()).collect();
    assert_eq!(totals, vec![1, 3, 8]);
}

#[test]
fn formulas_and_families() {
    let v = json(&run(&["formulas", "--check", "cg_t2", "--n-max", "8"], ""));
    assert_eq!(v[0]["all_match"], true);
    let v = json(&run(&["family", "n11_matrices", "--params", "i=1"], ""));
    assert_eq!(v, serde_json::json!({"classes": [3, 3, 5], "shift_minimal": [[2, 2, 3], [1, 2, 5]]}));
    let v = json(&run(&["family", "lemma_6_1_second", "--analyze"], ""));
    assert_eq!(v["record"]["k_trade_fail"], 3);
}

#[test]
fn convert_round_trip() {
    let explicit = json(&run(&["convert", "-", "--to", "explicit"], r#"{"quota":9,"weights":[1,1,1,1,1,1,1,1,1,1,1,1]}"#));
    assert_eq!(explicit["minimal_winning"].as_array().unwrap().len(), 220);
    let text = explicit.to_string();
    let inv = json(&run(&["convert", "-", "--to", "invariants"], &text));
    assert_eq!(inv, serde_json::json!({"classes": [12], "shift_minimal": [[9]]}));
    let back = json(&run(&["convert", "-", "--to", "explicit"], &inv.to_string()));
    assert_eq!(back, explicit);
    let w = json(&run(&["convert", "-", "--to", "weighted", "--per-player"], UNSC));
    assert_eq!(w["weights"].as_array().unwrap().len(), 15);
}
