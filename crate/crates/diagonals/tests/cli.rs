use std::path::PathBuf;
use std::process::Command;

use proptest::prelude::*;
use serde_json::Value;

use diagonals::cli::oracle::{random_extended_sequence, rng};
use diagonals::cli::{cmd_check, Format, Overrides, ProblemSpec};
use diagonals::decision::{decide_up_to, Outcome};

fn problem(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "examples", "problems", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_diagonals")).args(args).output().expect("binary runs");
    (out.status.code().expect("exit code"), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).expect("report is JSON")
}

#[test]
fn problem_files_have_their_exit_codes() {
    for (file, code) in [
        ("finite_two_by_two.json", 0),
        ("strictly_positive_diagonal.json", 0),
        ("one_negative_chain.json", 0),
        ("two_sided_nonsummable.json", 0),
        ("kernel_witness.json", 1),
        ("garbled.json", 64),
    ] {
        let (c, _) = run(&["--precision", "1", "check", &problem(file)]);
        assert_eq!(c, code, "{file}");
    }
}

#[test]
fn malformed_input_reports_its_position() {
    let (c, out) = run(&["check", &problem("garbled.json")]);
    assert_eq!(c, 64);
    let v = json(&out);
    assert_eq!(v["error"], "input");
    assert_eq!(v["line"], 1);
    assert!(v["column"].as_u64().unwrap() > 0);
    let (c, _) = run(&["check", "/nonexistent/problem.json"]);
    assert_eq!(c, 64);
}

#[test]
fn build_exit_codes() {
    let (c, out) = run(&["build", &problem("finite_two_by_two.json")]);
    assert_eq!(c, 0);
    assert!(out.contains("residual"));
    let (c, _) = run(&["build", &problem("two_sided_nonsummable.json")]);
    assert_eq!(c, 5);
}

#[test]
fn one_negative_build_leaves_the_expected_residual() {
    let (c, out) = run(&["build", &problem("one_negative_chain.json")]);
    assert_eq!(c, 0);
    // stdout carries the report and then the matrix artifact
    let v = serde_json::Deserializer::from_str(&out).into_iter::<Value>().next().unwrap().unwrap();
    // λ₋₁ = 1 minus the excess 1 - 2^-200 of the first 200 terms
    let expected = format!("-1/{}", num_bigint::BigInt::from(1) << 200);
    assert_eq!(v["trace"]["residual_exact"], expected.as_str());
    assert!(v["residuals"]["diagonal_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn oracle_subcommands_pass() {
    for args in [
        vec!["oracle", "lr-equivalence", "--seed", "1", "--n", "200"],
        vec!["oracle", "schur-horn-roundtrip", "--dim", "8", "--trials", "100"],
        vec!["oracle", "transformer-postconditions", "--transform", "midseq", "--trials", "50"],
    ] {
        let (c, out) = run(&args);
        assert_eq!(c, 0, "{args:?}: {out}");
        assert_eq!(json(&out)["passed"], true);
    }
}

#[test]
fn json_and_text_reports_agree() {
    for file in ["finite_two_by_two.json", "kernel_witness.json", "strictly_positive_diagonal.json"] {
        let (c1, j) = run(&["--precision", "1", "--format", "json", "check", &problem(file)]);
        let (c2, t) = run(&["--precision", "1", "--format", "text", "check", &problem(file)]);
        assert_eq!(c1, c2);
        let outcome = json(&j)["outcome"].as_str().unwrap().to_string();
        assert!(t.starts_with(&format!("outcome: {outcome} ")), "{file}: {t}");
    }
}

#[test]
fn stdin_is_accepted() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_diagonals"))
        .args(["check", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::null())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(br#"{"lambda": {"prefix": ["3", "1"]}, "d": {"prefix": ["3", "2"]}}"#).unwrap();
    assert_eq!(child.wait().unwrap().code(), Some(1));
}

#[test]
fn exit_code_is_a_function_of_the_outcome() {
    let mut g = rng(17);
    let ov = Overrides { precision: Some(1), truncation: None, format: Some(Format::Json) };
    for _ in 0..40 {
        let spec = ProblemSpec::new(random_extended_sequence(&mut g), random_extended_sequence(&mut g));
        let out = cmd_check(&spec.to_json().to_string(), &ov);
        let v = decide_up_to(&spec.lambda, &spec.d, 1);
        assert_eq!(out.code, v.outcome.exit_code());
        assert_eq!(json(&out.report)["outcome"], v.outcome.label());
    }
    let codes: Vec<i32> =
        [Outcome::Diagonal, Outcome::NotDiagonal, Outcome::KernelInconclusive, Outcome::PrecisionUnknown].map(|o| o.exit_code()).to_vec();
    assert_eq!(codes, vec![0, 1, 2, 3]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn problem_specs_round_trip(seed in any::<u64>(), precision in 1u8..=3, truncation in 1usize..500, text in any::<bool>()) {
        let mut g = rng(seed);
        let mut spec = ProblemSpec::new(random_extended_sequence(&mut g), random_extended_sequence(&mut g));
        spec.options.precision = precision;
        spec.options.truncation = truncation;
        spec.options.format = if text { Format::Text } else { Format::Json };
        let back = ProblemSpec::parse(&spec.to_json().to_string()).unwrap();
        prop_assert_eq!(back, spec);
    }
}
