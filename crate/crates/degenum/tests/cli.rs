//! End-to-end checks of the command-line surface: output shapes,
//! documented example values, and exit codes.

use std::process::{Command, Output};

fn degenum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_degenum"))
        .args(args)
        .output()
        .expect("run degenum")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

#[test]
fn table_harmonic_csv() {
    let out = degenum(&["table", "harmonic", "--lambda", "1/2", "--nmax", "3", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1,1\n2,5/4\n3,11/8\n");
}

#[test]
fn table_harmonic_symbolic_pretty() {
    let out = degenum(&["table", "harmonic", "--lambda", "symbolic", "--nmax", "1"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("1: 1\n"), "got: {}", stdout(&out));
}

#[test]
fn table_symbolic_eval_at_zero_matches_classical() {
    let sym = degenum(&[
        "table", "harmonic", "--lambda", "symbolic", "--eval-at", "0", "--nmax", "4",
        "--format", "csv",
    ]);
    assert!(sym.status.success());
    let classical = degenum(&["table", "classical-harmonic", "--nmax", "4", "--format", "csv"]);
    assert!(classical.status.success());
    assert_eq!(stdout(&sym), stdout(&classical));
    assert_eq!(stdout(&classical), "1,1\n2,3/2\n3,11/6\n4,25/12\n");
}

#[test]
fn table_stirling2_collapses_at_lambda_one() {
    let out = degenum(&["table", "stirling2", "--lambda", "1", "--nmax", "4", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("2,1,0\n"), "S(2,1) should vanish at λ=1: {}", text);
    assert!(text.contains("4,4,1\n"));
}

#[test]
fn table_json_matches_csv_values() {
    let csv = stdout(&degenum(&[
        "table", "hyperharmonic", "--lambda", "2/5", "--r", "2", "--nmax", "5", "--format", "csv",
    ]));
    let json = stdout(&degenum(&[
        "table", "hyperharmonic", "--lambda", "2/5", "--r", "2", "--nmax", "5", "--format", "json",
    ]));
    let parsed: serde_json::Value = serde_json::from_str(&json).expect("valid json");
    let values = parsed["values"].as_array().expect("values array");
    let csv_rows: Vec<(&str, &str)> = csv
        .lines()
        .map(|l| l.split_once(',').expect("two fields"))
        .collect();
    assert_eq!(values.len(), csv_rows.len());
    for (v, (n, cell)) in values.iter().zip(&csv_rows) {
        assert_eq!(v["n"].to_string(), *n);
        assert_eq!(v["value"].as_str().unwrap(), *cell);
    }
}

#[test]
fn expand_harmonic_at_lambda_one() {
    let out = degenum(&["expand", "harmonic", "--lambda", "1", "--order", "4"]);
    assert!(out.status.success());
    assert!(
        stdout(&out).starts_with("t + t^2 + t^3 + t^4 + O(t^5)\n"),
        "got: {}",
        stdout(&out)
    );
}

#[test]
fn expand_deg_log_symbolic() {
    let out = degenum(&["expand", "deg-log", "--lambda", "symbolic", "--order", "2"]);
    assert!(out.status.success());
    assert!(
        stdout(&out).starts_with("t + (-1/2 + 1/2λ) t^2 + O(t^3)\n"),
        "got: {}",
        stdout(&out)
    );
}

#[test]
fn expand_hf_prints_both_coefficient_views() {
    let out = degenum(&["expand", "hf", "--x", "1", "--lambda", "1/2", "--order", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("3/2 t^2"), "ordinary coefficient: {}", text);
    assert!(text.contains("egf: 0, 1, 3\n"), "egf view: {}", text);
}

#[test]
fn verify_misprint_exits_zero() {
    let out = degenum(&["verify", "THM2_PRINTED", "--lambda", "1/2", "--nmax", "4"]);
    assert!(out.status.success(), "expected exit 0 for documented misprint");
    let text = stdout(&out);
    assert!(text.contains("left 5/4 != right 5/2"), "got: {}", text);
    assert!(text.contains("expectations met"));
}

#[test]
fn verify_all_reduced_grid_exits_zero() {
    let out = degenum(&[
        "verify", "--all", "--lambda", "1/2", "--nmax", "6", "--r", "2", "--order", "10",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("unexpected=0"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["table", "nosuchfamily"],
        vec!["table", "harmonic", "--lambda", "0"],
        vec!["verify", "NOSUCHID"],
        vec!["verify"],
        vec!["expand", "deg-log", "--order", "99"],
        vec!["table", "harmonic", "--format", "xml"],
        vec!["nosuchcommand"],
    ] {
        let out = degenum(&args);
        assert_eq!(out.status.code(), Some(2), "args {:?} should exit 2", args);
    }
}
