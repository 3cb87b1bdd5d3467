use std::process::Command;

use lie3::cli::{run, EXIT_COMPUTE, EXIT_FAIL, EXIT_OK, EXIT_USAGE};
use lie3::theorem_suite_parallel;
use lie3_core::classify::theorem_suite;
use lie3::json::OPAQUE;
use lie3_core::parse_with;
use serde_json::Value;

fn lie3(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("lie3").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn exit_codes() {
    assert_eq!(lie3(&["jordan", "--matrix", "[[1,0,0],[0,2,0],[0,0,3]]"]).0, EXIT_OK);
    let (code, _, err) = lie3(&["frobnicate"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("Usage"));
    assert_eq!(lie3(&["jordan"]).0, EXIT_USAGE);
    assert_eq!(lie3(&["jordan", "--matrix", "no-such-file.json"]).0, EXIT_USAGE);
    assert_eq!(lie3(&["jordan", "--matrix", "[[1,0,0],[0,1,0],[0,0,\"x\"]]"]).0, EXIT_USAGE);
    assert_eq!(lie3(&["jordan", "--matrix", "[[1,0,0],[0,1,0],[0,0,1e400]]"]).0, EXIT_USAGE);
    assert_eq!(lie3(&["canonical", "--case", "2", "--params", r#"{"c":0}"#]).0, EXIT_COMPUTE);
    assert_eq!(lie3(&["canonical", "--case", "5"]).0, EXIT_USAGE);
    let (code, out, _) = lie3(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("theorem"));
}

#[test]
fn verify_negative_path_reports_residuals() {
    let sys = r#"{"case":3,"params":{"a11":1,"a12":1,"a13":0,"a21":2,"a22":1,"a23":0,"a31":1,"a32":1,"a33":0,"alpha":1}}"#;
    let gen = r#"{"xi":"1","eta":["y","0","0"]}"#;
    let (code, out, _) = lie3(&["verify", "--system", sys, "--generator", gen]);
    assert_eq!(code, EXIT_FAIL);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["admitted"], false);
    assert!(doc["residual_max_abs"].as_f64().unwrap() > 0.0);
}

#[test]
fn output_is_deterministic() {
    let args = ["theorem", "--seed", "9", "--draws", "5"];
    let a = lie3(&args).1;
    for _ in 0..3 {
        assert_eq!(lie3(&args).1, a);
    }
    let args = ["family", "--branch", "xi-zero", "--jordan", r#"{"kind":"J3","b":2}"#, "--subcase", "a!=0,b!=0"];
    assert_eq!(lie3(&args).1, lie3(&args).1);
}

#[test]
fn parallel_suite_matches_sequential() {
    let p = theorem_suite_parallel(11, 6).unwrap();
    let s = theorem_suite(11, 6).unwrap();
    assert!(p.passed() && s.passed());
    for (a, b) in p.cases.iter().zip(&s.cases) {
        assert_eq!((a.case, a.draws, a.symbolic), (b.case, b.draws, b.symbolic));
    }
    assert_eq!(lie3_json(&["theorem", "--seed", "11", "--draws", "6"]), lie3::json::theorem_json(&s));
}

fn lie3_json(args: &[&str]) -> Value {
    serde_json::from_str(&lie3(args).1).unwrap()
}

#[test]
fn expressions_round_trip_through_the_grammar() {
    let doc = lie3_json(&["family", "--branch", "xi-zero", "--jordan", r#"{"kind":"J2","c":3}"#, "--subcase", "a!=0"]);
    for key in ["F", "G", "H"] {
        let text = doc[key].as_str().unwrap();
        let e = parse_with(text, &OPAQUE).unwrap();
        assert_eq!(parse_with(&e.to_string(), &OPAQUE).unwrap(), e, "{key}");
    }
    for key in ["s", "v", "w"] {
        parse_with(doc["invariants"][key].as_str().unwrap(), &OPAQUE).unwrap();
    }
}

#[test]
fn family_template_verifies_as_a_system() {
    let doc = lie3_json(&["family", "--branch", "xi-nonzero", "--jordan", r#"{"kind":"J3","a":1,"b":2}"#]);
    let sys = serde_json::json!({ "kind": "general", "F": doc["F"], "G": doc["G"], "H": doc["H"] }).to_string();
    let gen = doc["generator"].to_string();
    let (code, out, _) = lie3(&["verify", "--system", &sys, "--generator", &gen]);
    assert_eq!(code, EXIT_OK, "{out}");
}

#[test]
fn matrix_classification_examples() {
    let doc = lie3_json(&["classify", "--matrix", "[[0,1,0],[0,0,1],[0,0,0]]"]);
    assert_eq!(doc["case"], 4);
    assert_eq!(doc["params"]["alpha"], "0");
    let doc = lie3_json(&["classify", "--matrix", "[[1,0,0],[0,0,2],[0,-2,0]]"]);
    assert_eq!(doc["case"], 2);
    assert_eq!(doc["params"]["alpha"], "1");
}

#[test]
fn classify_fitted_system() {
    let sys = r#"{"case":2,"params":{"a11":1,"a21":2,"a31":0,"beta":1,"gamma":"1/2","c1":3,"c2":1,"alpha":"-1","c":2}}"#;
    let doc = lie3_json(&["classify", "--system", sys]);
    assert_eq!(doc["verdict"], "canonical-case");
    assert_eq!(doc["case"], 2);
    assert_eq!(doc["params"]["gamma"], "1/2");
    assert_eq!(doc["residual_max_abs"], 0.0);
}

#[test]
fn binary_uses_seed_from_environment() {
    let bin = env!("CARGO_BIN_EXE_lie3");
    let with_env = Command::new(bin).args(["theorem", "--draws", "2"]).env("LIE3_SEED", "77").output().unwrap();
    let explicit = Command::new(bin).args(["theorem", "--draws", "2", "--seed", "77"]).env_remove("LIE3_SEED").output().unwrap();
    assert_eq!(with_env.status.code(), Some(0));
    assert_eq!(with_env.stdout, explicit.stdout);
    let doc: Value = serde_json::from_slice(&with_env.stdout).unwrap();
    assert_eq!(doc["seed"], 77);
}
