//! End-to-end checks against the compiled binary: output bytes, file writing,
//! and flag validation. Heavier mathematical coverage lives in `acceptance.rs`.

use std::path::PathBuf;
use std::process::{Command, Output};

fn verify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_verify"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn verify_with_workers(args: &[&str], workers: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_verify"))
        .env("VERIFY_WORKERS", workers)
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn json_report_round_trips_through_the_binary() {
    let out = verify(&["modular", "--level", "2", "--truncation", "12", "--format", "json"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let report: serde_json::Value = serde_json::from_slice(&out.stdout).expect("valid json");
    assert_eq!(report["schema"], "verify-report/1");
    assert_eq!(report["command"], "modular");
    assert_eq!(report["summary"]["total"], 1);
    assert_eq!(report["summary"]["passed"], 1);
    assert_eq!(report["items"][0]["status"], "pass");
    assert_eq!(report["items"][0]["identity_verified"], true);
    // The certificate must carry exact rationals as strings, not floats.
    assert_eq!(report["items"][0]["certificate"]["series_order"], "-1");
}

#[test]
fn out_flag_writes_the_report_and_keeps_stdout_quiet() {
    let path: PathBuf = std::env::temp_dir().join(format!("verify-smoke-{}.json", std::process::id()));
    let path_str = path.to_str().unwrap();
    let out = verify(&[
        "cyclotomic", "--ell", "5", "--construction", "cos-plus-one",
        "--format", "json", "--out", path_str,
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty(), "report should go to the file, not stdout");

    let body = std::fs::read_to_string(&path).expect("report file exists");
    let report: serde_json::Value = serde_json::from_str(&body).expect("valid json");
    assert_eq!(report["summary"]["passed"], 1);
    std::fs::remove_file(&path).ok();
}

#[test]
fn repeated_runs_emit_identical_bytes() {
    let args = ["modular", "--level", "2..3", "--truncation", "10", "--format", "json"];
    let first = verify_with_workers(&args, "2");
    let second = verify_with_workers(&args, "2");
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn usage_problems_exit_two_before_any_work() {
    // Descending range.
    let out = verify(&["cyclotomic", "--ell", "9..5", "--construction", "cos-plus-one"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    // ax+b demands both coefficients, b != 0, and |a| > 2|b|.
    for args in [
        vec!["cyclotomic", "--ell", "7", "--construction", "ax-plus-b"],
        vec!["cyclotomic", "--ell", "7", "--construction", "ax-plus-b", "--a", "5", "--b", "0"],
        vec!["cyclotomic", "--ell", "7", "--construction", "ax-plus-b", "--a", "2", "--b", "1"],
    ] {
        let out = verify(&args);
        assert_eq!(out.status.code(), Some(2), "args: {args:?}");
    }

    // Coefficients are rejected for constructions that do not take them.
    let out = verify(&["cyclotomic", "--ell", "7", "--construction", "cos-plus-one", "--a", "5", "--b", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn text_report_names_every_item() {
    let out = verify(&["cyclotomic", "--ell", "5..7", "--construction", "cos-plus-one"]);
    assert!(out.status.success(), "degenerate levels inside a range are skips, not errors");
    let text = String::from_utf8(out.stdout).unwrap();
    for needle in ["ell=5", "ell=6", "ell=7", "[pass]", "[skip]"] {
        assert!(text.contains(needle), "missing {needle:?} in:\n{text}");
    }
}
