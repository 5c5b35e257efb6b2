use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use moikit_core::ComplexDenseMatrix;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn moikit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moikit"))
        .args(args)
        .current_dir(fixture(""))
        .env("MOIKIT_LOG", "error")
        .output()
        .expect("moikit runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn result_matrix(report: &Value) -> ComplexDenseMatrix {
    ComplexDenseMatrix::from_json_str(&report["result"].to_string()).unwrap()
}

/// Report text up to the timings block.
fn body(out: &Output) -> String {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let cut = text.find("\n  \"timings\"").expect("timings key present");
    text[..cut].to_string()
}

#[test]
fn eval_square_of_diagonal() {
    let out = moikit(&["eval", "--function", "square.json", "--matrix", "diag.json"]);
    assert_eq!(code(&out), 0);
    let m = result_matrix(&json(&out));
    assert!((&m - &ComplexDenseMatrix::diag(&[1.0, 4.0])).max_abs() < 1e-12);
}

#[test]
fn eval_constant_is_identity() {
    let out = moikit(&["eval", "--function", "one.json", "--matrix", "a.json"]);
    assert_eq!(code(&out), 0);
    let m = result_matrix(&json(&out));
    assert!((&m - &ComplexDenseMatrix::identity(3)).max_abs() < 1e-12);
}

#[test]
fn eval_cos_at_zero_and_pi() {
    let out = moikit(&[
        "eval",
        "--function",
        "cos.json",
        "--matrix",
        "diag_0_pi.json",
    ]);
    assert_eq!(code(&out), 0);
    let m = result_matrix(&json(&out));
    assert!((&m - &ComplexDenseMatrix::diag(&[1.0, -1.0])).max_abs() < 1e-12);
}

#[test]
fn eval_writes_matrix_file_that_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("run.json");
    let out = moikit(&[
        "eval",
        "--function",
        "exp.json",
        "--matrix",
        "a.json",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let text = std::fs::read_to_string(dir.path().join("run.matrix.json")).unwrap();
    let written = ComplexDenseMatrix::from_json_str(&text).unwrap();
    assert_eq!(written, result_matrix(&report));
    let again = ComplexDenseMatrix::from_json_str(&written.to_json_string()).unwrap();
    assert_eq!(again, written);
}

#[test]
fn derivative_of_square_is_anticommutator() {
    let out = moikit(&[
        "derivative",
        "--function",
        "square.json",
        "--matrix",
        "a.json",
        "--matrix",
        "b.json",
    ]);
    assert_eq!(code(&out), 0);
    let m = result_matrix(&json(&out));
    let a = moikit::load("a.json");
    let b = moikit::load("b.json");
    let want = &a.matmul(&b) + &b.matmul(&a);
    assert!((&m - &want).max_abs() < 1e-12);
}

#[test]
fn derivative_beyond_degree_vanishes() {
    let out = moikit(&[
        "derivative",
        "--function",
        "square.json",
        "--matrix",
        "a.json",
        "--matrix",
        "b.json",
        "--order",
        "3",
        "--check",
    ]);
    assert_eq!(code(&out), 0);
    assert!(result_matrix(&json(&out)).max_abs() < 1e-12);
}

#[test]
fn derivative_matches_shipped_fd_fixture() {
    let out = moikit(&[
        "derivative",
        "--config",
        "cos_fd_k2.json",
        "--strategy",
        "moi",
        "--reference",
        "cos_k2_fd.matrix.json",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["reports"].as_array().unwrap().len(), 2);
    for r in report["reports"].as_array().unwrap() {
        let c = &r["checks"][0];
        assert!(c["residual"].as_f64().unwrap() <= 1e-4, "{c}");
    }
}

#[test]
fn failed_check_exits_one() {
    let out = moikit(&[
        "derivative",
        "--config",
        "cos_fd_k2.json",
        "--tolerance",
        "derivative_fd=1e-20",
    ]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["pass"], Value::Bool(false));
}

#[test]
fn remainder_of_square_is_b_squared() {
    let out = moikit(&[
        "remainder",
        "--function",
        "square.json",
        "--matrix",
        "a.json",
        "--matrix",
        "b.json",
        "--order",
        "2",
    ]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    let b = moikit::load("b.json");
    assert!((&result_matrix(&report) - &b.matmul(&b)).max_abs() < 1e-12);
    for c in report["reports"][0]["checks"].as_array().unwrap() {
        assert!(c["residual"].as_f64().unwrap() < 1e-12, "{c}");
    }
}

#[test]
fn remainder_of_zero_perturbation_is_zero() {
    let out = moikit(&[
        "remainder",
        "--function",
        "cos.json",
        "--matrix",
        "a.json",
        "--matrix",
        "zero.json",
        "--order",
        "2",
    ]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert!(result_matrix(&report).is_zero());
    for c in report["reports"][0]["checks"].as_array().unwrap() {
        assert_eq!(c["residual"].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn remainder_cos_schatten_bound_records_slack() {
    let out = moikit(&["remainder", "--config", "cos_remainder_k1.json"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    let schatten = &report["reports"][1];
    assert_eq!(schatten["pass"], Value::Bool(true));
    assert!(
        schatten["metrics"]["slack"].as_f64().unwrap() >= 0.0,
        "{schatten}"
    );
}

#[test]
fn verify_is_byte_identical_across_runs() {
    let first = moikit(&["verify", "--seed", "42"]);
    let second = moikit(&["verify", "--seed", "42"]);
    assert_eq!(
        code(&first),
        0,
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    assert_eq!(code(&second), 0);
    assert_eq!(body(&first), body(&second));
}

#[test]
fn verify_results_do_not_depend_on_thread_count() {
    let one = json(&moikit(&[
        "verify",
        "--filter",
        "perturbation",
        "--threads",
        "1",
    ]));
    let four = json(&moikit(&[
        "verify",
        "--filter",
        "perturbation",
        "--threads",
        "4",
    ]));
    assert_eq!(one["suite"], four["suite"]);
}

#[test]
fn verify_filter_runs_one_family() {
    let report = json(&moikit(&["verify", "--filter", "perturbation"]));
    let families = report["suite"]["families"].as_array().unwrap();
    assert_eq!(families.len(), 1);
    assert_eq!(families[0]["name"], "perturbation");
}

#[test]
fn verify_with_corrupted_tolerance_fails() {
    let out = moikit(&[
        "verify",
        "--filter",
        "perturbation",
        "--tolerance",
        "perturbation=1e-20",
    ]);
    assert_eq!(code(&out), 1);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"pass\": false"));
}

#[test]
fn exit_codes_for_bad_inputs() {
    let not_hermitian = moikit(&[
        "eval",
        "--function",
        "square.json",
        "--matrix",
        "not_hermitian.json",
    ]);
    assert_eq!(code(&not_hermitian), 2);
    let malformed = moikit(&[
        "eval",
        "--function",
        "square.json",
        "--matrix",
        "malformed.json",
    ]);
    assert_eq!(code(&malformed), 3);
    let missing = moikit(&[
        "eval",
        "--function",
        "square.json",
        "--matrix",
        "missing.json",
    ]);
    assert_eq!(code(&missing), 3);
    let unknown_flag = moikit(&["eval", "--bogus"]);
    assert_eq!(code(&unknown_flag), 3);
    let power_on_cos = moikit(&[
        "derivative",
        "--function",
        "cos.json",
        "--matrix",
        "a.json",
        "--matrix",
        "b.json",
        "--strategy",
        "power",
    ]);
    assert_eq!(code(&power_on_cos), 2);
    let help = moikit(&["--help"]);
    assert_eq!(code(&help), 0);
}

#[test]
fn bench_reports_timings() {
    let report = json(&moikit(&["bench"]));
    assert_eq!(report["pass"], Value::Bool(true));
    assert!(report["timings"]["moi_evaluate_k2_n6"].as_f64().unwrap() > 0.0);
}

mod moikit {
    use super::*;

    pub fn load(name: &str) -> ComplexDenseMatrix {
        ComplexDenseMatrix::from_json_str(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
    }
}
