use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use divpair::cli::run;
use proptest::prelude::*;
use serde_json::Value;

fn divpair(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divpair")).args(args).env_remove("DIVPAIR_TOL").output().expect("binary runs")
}

fn divpair_with_tol(tol: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divpair")).args(args).env("DIVPAIR_TOL", tol).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn close(v: &Value, expected: f64, tol: f64) -> bool {
    v.as_f64().is_some_and(|x| (x - expected).abs() < tol)
}

#[test]
fn green_examples() {
    let out = divpair(&["green", "--curve", "sphere", "--divisor", "1@2,-1@-2", "--at", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert!(close(&doc["outputs"]["value"]["re"], -(3f64.ln()), 1e-15));
    assert_eq!(doc["status"], "pass");

    let out = divpair(&["green", "--curve", "sphere", "--divisor", "", "--at", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["outputs"]["value"]["re"].as_f64(), Some(0.0));

    let out = divpair(&["green", "--curve", "sphere", "--divisor", "1@2", "--at", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("degree must be zero"));
    assert!(out.stdout.is_empty());

    let out = divpair(&["green", "--curve", "sphere", "--divisor", "1@2,-1@-2", "--at", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("diagonal singularity"));
}

#[test]
fn green_on_torus_with_marks() {
    let out = divpair(&[
        "green", "--curve", "torus", "--tau", "0.1+1.2i", "--marks", "0.2+0.1i,0.7+0.4i", "--divisor", "1/2+i@Q1,-1/2-i@Q2",
        "--at", "0.4+0.9i",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json(&out);
    assert_eq!(doc["inputs"]["divisor"], "1/2+i@Q1,-1/2-i@Q2");
    assert!(doc["outputs"]["value"]["im"].as_f64().unwrap().abs() > 0.0);
}

#[test]
fn pairing_examples() {
    let out = divpair(&["pairing", "--curve", "sphere", "--d1", "1@1,-1@-1", "--d2", "1@2,-1@-2"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert!(close(&doc["outputs"]["norm"], 1.0 / 9.0, 1e-15));
    assert!(doc["outputs"]["max_discrepancy"].as_f64().unwrap() < 1e-12);
    for f in ["ad", "adsym", "ad3"] {
        assert!(close(&doc["outputs"]["formulas"][f]["norm"], 1.0 / 9.0, 1e-15));
    }

    let out = divpair(&[
        "pairing", "--curve", "sphere", "--marks", "1,-1,2,-2", "--d1", "i@Q1,-i@Q2", "--d2", "1@Q3,-1@Q4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(close(&json(&out)["outputs"]["norm"], 1.0, 1e-15));

    let out = divpair(&["pairing", "--curve", "sphere", "--d1", "1@1,-1@-1", "--d2", "1@1,-1@3"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("divisors not disjoint"));

    let out = divpair(&["pairing", "--d1", "1@1,-1@-1", "--d2", "1@2,-1@-2", "--formula", "adsym"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert!(doc["outputs"].get("max_discrepancy").is_none());
    assert!(doc["outputs"]["formulas"].get("ad").is_none());
}

#[test]
fn reciprocity_example() {
    let out = divpair(&["reciprocity", "--curve", "sphere", "--f", "zeros:0;poles:2", "--g", "zeros:1;poles:3"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["outputs"]["residual"].as_f64(), Some(0.0));
    for key in ["f_of_div_g", "g_of_div_f"] {
        assert!(close(&doc["outputs"][key]["re"], -1.0 / 3.0, 1e-15));
        assert!(close(&doc["outputs"][key]["im"], 0.0, 1e-15));
    }
}

#[test]
fn reciprocity_on_torus_and_bad_functions() {
    // Zeros 0.2, 0.5+0.3i and poles 0.3+0.1i, 0.4+0.2i: the sums agree.
    let out = divpair(&[
        "reciprocity", "--curve", "torus", "--tau", "i", "--f", "zeros:0.2,0.5+0.3i;poles:0.3+0.1i,0.4+0.2i", "--g",
        "zeros:0.7+0.6i^2;poles:0.6+0.5i,0.8+0.7i;const:2-i",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(json(&out)["outputs"]["residual"].as_f64().unwrap() < 1e-9);

    let out = divpair(&["reciprocity", "--curve", "torus", "--tau", "i", "--f", "zeros:0.2;poles:0.3", "--g", "zeros:0.1;poles:0.1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("not an elliptic function"));

    let out = divpair(&["reciprocity", "--f", "zeros:0;bogus:2", "--g", "zeros:1;poles:3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn class_example() {
    let out = divpair(&["class", "--curve", "torus", "--tau", "i", "--divisor", "1@0.25,-1@0.75"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let descriptor = &doc["outputs"]["descriptor"];
    assert_eq!(descriptor["degree"], 0);
    assert!(close(&descriptor["jacobian"]["re"], 0.5, 1e-12));
    assert!(close(&descriptor["jacobian"]["im"], 0.0, 1e-12));
    assert_eq!(doc["outputs"]["principal"]["principal"], false);
    assert_eq!(doc["outputs"]["principal"]["monodromy"]["trivial"], false);
}

#[test]
fn class_comparison() {
    let out = divpair(&[
        "class", "--curve", "torus", "--tau", "0.3+1.1i", "--divisor", "1@0.2+0.1i,-1@0.5+0.5i", "--other",
        "1@1.2+0.1i,-1@0.5+0.5i",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json(&out);
    assert_eq!(doc["outputs"]["same_class"], true);
    assert_eq!(doc["outputs"]["difference_principal"]["principal"], true);
    assert_eq!(doc["outputs"]["difference_principal"]["monodromy"]["trivial"], true);

    let out = divpair(&["class", "--curve", "sphere", "--divisor", "1@0,-1@1"]);
    let doc = json(&out);
    assert_eq!(doc["outputs"]["descriptor"]["jacobian"], Value::Null);
    assert_eq!(doc["outputs"]["principal"]["principal"], true);
}

#[test]
fn string_factor_files() {
    let out = divpair(&["string-factor", "--config", &data("two_point.toml")]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json(&out);
    assert!(close(&doc["outputs"]["factor"], 1.0 / 9.0, 1e-12));
    assert_eq!(doc["metadata"]["diagonal_terms_omitted"], true);
    assert_eq!(doc["outputs"]["momentum_divisors"][0], "1@Q1,-1@Q2");
    assert_eq!(doc["outputs"]["per_component"].as_array().unwrap().len(), 13);

    let out = divpair(&["string-factor", "--config", &data("three_point_torus.toml")]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(json(&out)["outputs"]["factor"].as_f64().unwrap() > 0.0);

    let out = divpair(&["string-factor", "--config", &data("missing.toml")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn selftest_passes_quickly_and_deterministically() {
    let started = Instant::now();
    let first = divpair(&["selftest", "--seed", "42", "--cases", "100"]);
    assert!(started.elapsed() < Duration::from_secs(60));
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stdout));
    let doc = json(&first);
    assert_eq!(doc["outputs"]["failed"], 0);
    assert!(doc["outputs"]["total"].as_u64().unwrap() >= 30);
    let second = divpair(&["selftest", "--seed", "42", "--cases", "100"]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn selftest_csv_table() {
    let out = divpair(&["selftest", "--seed", "0x2a", "--cases", "10", "--only", "pairing.", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("module,property,cases,max_residual,tolerance,errors,status"));
    assert!(lines.all(|l| l.starts_with("pairing,") && l.ends_with(",pass")));
}

#[test]
fn tolerance_overrides() {
    let args = ["selftest", "--seed", "1", "--cases", "20", "--only", "kernel_symmetry"];
    let out = divpair_with_tol("kernel_symmetry=1e-300", &args);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["status"], "fail");
    assert_eq!(json(&out)["metadata"]["tolerances_overridden"], true);

    let out = divpair_with_tol("1e-3", &args);
    assert_eq!(out.status.code(), Some(0));

    let out = divpair_with_tol("kernel_symmetry", &args);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("DIVPAIR_TOL"));
}

#[test]
fn parse_and_domain_exit_codes() {
    let cases: &[(&[&str], i32)] = &[
        (&["green", "--divisor", "1@@2", "--at", "1"], 2),
        (&["green", "--divisor", "x@2", "--at", "1"], 2),
        (&["green", "--divisor", "1@2,-1@3", "--at", "one"], 2),
        (&["green", "--curve", "torus", "--divisor", "", "--at", "0.5"], 2),
        (&["green", "--curve", "sphere", "--tau", "i", "--divisor", "", "--at", "0.5"], 2),
        (&["green", "--curve", "torus", "--tau", "-i", "--divisor", "", "--at", "0.5"], 3),
        (&["green", "--curve", "torus", "--tau", "i", "--divisor", "", "--at", "inf"], 3),
        (&["green", "--marks", "1,1", "--divisor", "", "--at", "0"], 3),
        (&["green", "--marks", "Q1", "--divisor", "", "--at", "0"], 2),
        (&["green", "--divisor", "1@Q3", "--at", "0"], 3),
        (&["green", "--divisor", "1/2@0,-1/2@1", "--at", "5"], 3),
        (&["pairing", "--d1", "1@0,-1@1", "--d2", "1@2,-1@3", "--formula", "nope"], 2),
        (&["selftest", "--seed", "0xZZ"], 2),
        (&["frobnicate"], 2),
    ];
    for (args, code) in cases {
        let out = divpair(args);
        assert_eq!(out.status.code(), Some(*code), "{args:?}: {}", stderr(&out));
        assert!(stderr(&out).starts_with("error"), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    let out = divpair(&[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("Usage"));
}

#[test]
fn help_and_version_exit_zero() {
    for args in [&["--help"][..], &["--version"], &["selftest", "--help"]] {
        let out = divpair(args);
        assert_eq!(out.status.code(), Some(0));
        assert!(!out.stdout.is_empty());
    }
}

#[test]
fn in_process_runs_match_the_binary() {
    let args = ["divpair", "pairing", "--d1", "1@1,-1@-1", "--d2", "1@2,-1@-2"];
    let outcome = run(args);
    let out = divpair(&args[1..]);
    assert_eq!(outcome.code, 0);
    assert_eq!(outcome.stdout.as_bytes(), out.stdout.as_slice());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn malformed_input_never_panics(divisor in "[-0-9i@Q,./+ inf]{0,16}", at in "[-0-9i.Q+ inf]{0,6}") {
        let outcome = run(["divpair", "green", "--marks", "1,2i", "--divisor", &divisor, "--at", &at]);
        prop_assert!([0, 2, 3].contains(&outcome.code), "code {} for {divisor:?} {at:?}", outcome.code);
        prop_assert!(!outcome.stderr.contains("internal failure"), "{}", outcome.stderr);
    }

    #[test]
    fn malformed_pairings_never_panic(d1 in "[-0-9i@Q,/+]{0,12}", d2 in "[-0-9i@Q,/+]{0,12}") {
        let outcome = run(["divpair", "pairing", "--marks", "0,1,2,3", "--d1", &d1, "--d2", &d2]);
        prop_assert!([0, 1, 2, 3].contains(&outcome.code));
        prop_assert!(!outcome.stderr.contains("internal failure"), "{}", outcome.stderr);
    }
}
