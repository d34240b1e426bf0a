use std::path::PathBuf;
use std::process::Command;

use pglab::{run, Outcome};
use serde_json::Value;

fn scratch(name: &str, body: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("cli-{}-{name}", std::process::id()));
    std::fs::write(&path, body).unwrap();
    path
}

fn pglab(args: &[&str]) -> Outcome {
    run(std::iter::once("pglab").chain(args.iter().copied()))
}

fn with_input(cmd: &str, name: &str, input: &str, extra: &[&str]) -> (i32, Value) {
    let path = scratch(name, input);
    let mut args = vec![cmd, "--input", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = pglab(&args);
    let json = serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {out:?}"));
    (out.code, json)
}

fn small_config(p: u32) -> PathBuf {
    scratch(&format!("config-p{p}.json"), &format!(r#"{{"p": {p}, "truncation": 16, "cases": 6}}"#))
}

#[test]
fn psi_of_a_cube_is_oneplus_x() {
    let (code, j) = with_input("psi", "psi.json", r#"{"f": "(1+X)^3"}"#, &[]);
    assert_eq!(code, 0);
    assert_eq!(j["result"]["text"], "1 + X");
    assert_eq!(j["status"], "pass");
    assert_eq!(j["provenance"]["config"]["p"], 3);
    assert!(j["provenance"]["precision"]["achieved"].as_i64().unwrap() >= 18);
}

#[test]
fn wronskian_recovers_the_planted_line() {
    let (code, j) = with_input("wronskian", "w.json", r#"{"vectors": [["1"], ["X"], ["3+5*X"]]}"#, &[]);
    assert_eq!(code, 0);
    // normalized so the last coefficient is 1: proportional to (3, 5, −1)
    assert_eq!(j["result"]["certificate"]["lambdas"], serde_json::json!(["-3", "-5", "1"]));
    assert_eq!(j["result"]["certificate"]["residual"], Value::Null);
}

#[test]
fn wronskian_without_relation_exits_one() {
    let (code, j) = with_input("wronskian", "w2.json", r#"{"vectors": [["1"], ["X"]]}"#, &[]);
    assert_eq!(code, 1);
    assert_eq!(j["result"]["outcome"], "not_found");
}

#[test]
fn g_criterion_on_inverse_x_is_nonzero_with_valuation_minus_one_over_p_minus_one() {
    for (p, v) in [(2, "-1"), (3, "-1/2"), (5, "-1/4")] {
        let cfg = small_config(p);
        let (code, j) =
            with_input("g-criterion", &format!("g{p}.json"), r#"{"weights": [0], "y": ["1/X"]}"#, &["--config", cfg.to_str().unwrap()]);
        assert_eq!(code, 1, "p={p}");
        assert_eq!(j["result"]["report"]["vanishes"], false);
        assert_eq!(j["result"]["valuations"][0]["by_expansion"], v);
        assert_eq!(j["result"]["valuations"][0]["by_norm"], v);
    }
}

#[test]
fn gamma_relation_outcomes() {
    let (code, j) = with_input("gamma-relation", "gr1.json", r#"{"weights": [-1], "y": ["t"]}"#, &[]);
    assert_eq!(code, 0);
    assert_eq!(j["result"]["polynomial"], "γ - 1");
    let (code, j) = with_input("gamma-relation", "gr2.json", r#"{"weights": [0], "y": ["X"]}"#, &[]);
    assert_eq!(code, 1);
    assert_eq!(j["result"]["relation"]["outcome"], "no_relation");
}

#[test]
fn module_check_reports_membership_and_poles() {
    let (code, j) = with_input("module-check", "mc.json", r#"{"weights": [1, -1], "y": ["1", "1"]}"#, &[]);
    assert_eq!(code, 0);
    assert_eq!(j["result"]["in_tn"][0]["member"], true);
    assert_eq!(j["result"]["in_n"][1]["member"], false);
    assert_eq!(j["result"]["partial_pole_orders"], serde_json::json!([1, 1]));
}

#[test]
fn iota_lists_coefficients_per_level() {
    let (code, j) = with_input("iota", "io.json", r#"{"f": "X", "levels": [1, 2]}"#, &[]);
    assert_eq!(code, 0);
    let levels = j["result"].as_array().unwrap();
    assert_eq!(levels.len(), 2);
    assert_eq!(levels[1]["coefficients"].as_array().unwrap().len(), 8);
}

#[test]
fn norms_demo_matches_the_dichotomy() {
    let out = pglab(&["norms-demo"]);
    assert_eq!(out.code, 0, "{out:?}");
    let j: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(j["result"]["consistent"], true);
    assert_eq!(j["result"]["rows"][0]["verdicts"]["1"], "fail");
    assert_eq!(j["result"]["rows"][0]["valuation_at_level_1"], "-1/2");
    assert!(out.stderr.contains("1/X (weight 0)"));
}

#[test]
fn identities_pass_and_note_the_p2_restriction() {
    for p in [2, 3] {
        let cfg = small_config(p);
        let out = pglab(&["identities", "--config", cfg.to_str().unwrap()]);
        assert_eq!(out.code, 0, "{}", out.stdout);
        let j: Value = serde_json::from_str(&out.stdout).unwrap();
        let notes = j["result"]["notes"].as_array().unwrap();
        assert_eq!(notes.is_empty(), p != 2);
        let names: Vec<&str> = j["result"]["identities"].as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
    }
}

#[test]
fn corrupted_psi_names_the_failing_identity() {
    let cfg = small_config(3);
    let out = pglab(&["identities", "--config", cfg.to_str().unwrap(), "--inject-fault", "corrupt-psi"]);
    assert_eq!(out.code, 1);
    let j: Value = serde_json::from_str(&out.stdout).unwrap();
    let failing = j["result"]["failing"].as_array().unwrap();
    assert!(failing.iter().any(|f| f == "psi_phi_identity"));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(pglab(&[]).code, 64);
    assert_eq!(pglab(&["psi"]).code, 64);
    assert_eq!(pglab(&["bogus"]).code, 64);
    assert_eq!(pglab(&["identities", "--seed", "x"]).code, 64);
    let bad = scratch("bad-config.json", r#"{"p": 4}"#);
    assert_eq!(pglab(&["identities", "--config", bad.to_str().unwrap()]).code, 64);
    let bad_input = scratch("bad-psi.json", r#"{"g": "X"}"#);
    assert_eq!(pglab(&["psi", "--input", bad_input.to_str().unwrap()]).code, 64);
    let bad_expr = scratch("bad-expr.json", r#"{"f": "X +* 1"}"#);
    assert_eq!(pglab(&["psi", "--input", bad_expr.to_str().unwrap()]).code, 64);
    assert_eq!(pglab(&["--help"]).code, 0);
}

#[test]
fn precision_exhaustion_exits_two() {
    // ι_2 modulo t^8 needs N ≥ 17 at p = 3
    let cfg = scratch("low-prec.json", r#"{"precision": 10}"#);
    let (code, j) = with_input("iota", "io-low.json", r#"{"f": "X", "levels": [2]}"#, &["--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(j["status"], "indeterminate");
}

#[test]
fn fixtures_regenerate_to_the_checked_in_file() {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("fixtures-{}.json", std::process::id()));
    let out = pglab(&["--fixtures", path.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{out:?}");
    let fresh: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let stored: Value = serde_json::from_str(include_str!("fixtures/derived.json")).unwrap();
    assert_eq!(fresh, stored);
    assert_eq!(stored["inverse_of_2_mod_3^4"], 41);
    assert_eq!(stored["psi_p3_oneplusx_cubed"], "1 + X");
    assert_eq!(stored["psi_p3_inverse_x"], "X^-1");
    assert!(stored["nabla_estimate_agreement_p3_m5"].as_i64().unwrap() >= 4);
}

#[test]
fn binary_is_deterministic_and_uses_exit_codes() {
    let cfg = small_config(5);
    let exe = env!("CARGO_BIN_EXE_pglab");
    let go = || Command::new(exe).args(["identities", "--seed", "7", "--config", cfg.to_str().unwrap()]).output().unwrap();
    let (a, b) = (go(), go());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let other = Command::new(exe).args(["identities", "--seed", "8", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_ne!(a.stdout, other.stdout);
    assert_eq!(Command::new(exe).arg("nonsense").output().unwrap().status.code(), Some(64));
}
