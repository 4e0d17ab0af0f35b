use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn provlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_provlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = provlab(&all);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn prove_lob_in_gl_with_derivation() {
    let v = json(&["prove", "--logic", "GL", "[]([]p -> p) -> []p"]);
    assert_eq!(v["verdict"], "provable");
    assert!(v["derivation"]["rule"].is_string());
}

#[test]
fn prove_reports_countermodel_and_dot() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("cm.dot");
    let out = provlab(&[
        "--json",
        "--dot",
        dot.to_str().unwrap(),
        "prove",
        "--logic",
        "K4",
        "[]p -> p",
    ]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "not_provable");
    assert!(v["countermodel"]["model"]["nodes"].is_array());
    assert!(fs::read_to_string(&dot).unwrap().starts_with("digraph"));
}

#[test]
fn propositional_logics_route_through_modal_images() {
    let v = json(&["prove", "--logic", "IPC", "p \\/ ~p"]);
    assert_eq!(v["verdict"], "not_provable");
    let v = json(&["prove", "--logic", "CPC", "p \\/ ~p"]);
    assert_eq!(v["verdict"], "provable");
    let v = json(&["prove", "--logic", "BPC", "p -> q, q -> r => p -> r"]);
    assert_eq!(v["verdict"], "provable");
}

#[test]
fn translate_and_render() {
    let v = json(&["translate", "--flavor", "g", "~p"]);
    assert_eq!(v["output"], "[]~[]p");
    let v = json(&[
        "render",
        "[](p -> q) \\/ [](~[]p -> []q)",
        "--witness",
        "5,3,1,2",
    ]);
    assert_eq!(
        v["interpretation"],
        "Pr_5(sigma(p) -> sigma(q)) \\/ Pr_3(~Pr_1(sigma(p)) -> Pr_2(sigma(q)))"
    );
}

#[test]
fn witness_check_exit_codes() {
    assert!(provlab(&["witness", "check", "[][]p", "--witness", "2,1"])
        .status
        .success());
    assert_eq!(
        provlab(&["witness", "check", "[][]p", "--witness", "1,2"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        provlab(&["witness", "check", "[][]p", "--witness", "1"])
            .status
            .code(),
        Some(2)
    );
    let v = json(&["witness", "canonical", "[][]p", "--start", "4"]);
    let w = v["witness"].as_str().unwrap().to_string();
    assert!(provlab(&["witness", "check", "[][]p", "--witness", &w])
        .status
        .success());
}

#[test]
fn expand_lists_and_checks() {
    let v = json(&["expand", "[]p"]);
    let list: Vec<&str> = v["expansions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap())
        .collect();
    assert!(list.contains(&"[]p"));
    assert!(list.contains(&"[](p \\/ p)"));
    assert!(provlab(&["expand", "[]p", "--check", "[](p \\/ p \\/ p)"])
        .status
        .success());
    assert_eq!(
        provlab(&["expand", "[]p", "--check", "[]q"]).status.code(),
        Some(1)
    );
}

#[test]
fn unwind_model_file() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.json");
    fs::write(
        &model,
        r#"{"nodes":["a","b"],"relation":[["a","b"],["b","b"]],"valuation":{"p":["b"]}}"#,
    )
    .unwrap();
    let v = json(&[
        "unwind",
        "--model",
        model.to_str().unwrap(),
        "--formula",
        "[]p -> [][]p",
        "--t",
        "2,2,1",
        "--verify",
    ]);
    assert!(v["model"]["nodes"].as_array().unwrap().len() > 2);
    assert_eq!(v["transfer"]["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn crosscheck_small_suite_and_corpus() {
    let v = json(&["crosscheck", "--suite", "oracle-gl", "--sample", "40"]);
    assert_eq!(v["summary"]["items"], 40);
    assert_eq!(v["summary"]["disagreements"], 0);
    let v = json(&[
        "corpus",
        "--atoms",
        "p",
        "--max-connectives",
        "1",
        "--max-degree",
        "1",
        "--sample",
        "0",
    ]);
    assert_eq!(v["formulas"].as_array().unwrap().len(), 36);
}

#[test]
fn errors_exit_with_two() {
    let out = provlab(&["prove", "--logic", "XYZ", "p"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown logic"));
    assert_eq!(
        provlab(&["prove", "--logic", "K4", "p ->"]).status.code(),
        Some(2)
    );
    assert_eq!(
        provlab(&["crosscheck", "--suite", "nope"]).status.code(),
        Some(2)
    );
}
