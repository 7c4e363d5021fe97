//! End-to-end tests of the cdrsim binary: exit codes, output schemas, and
//! byte-level determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn cdrsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdrsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn temp_path(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cdrsim-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

// ======================================================================
// Exit codes
// ======================================================================

#[test]
fn help_and_version_exit_zero() {
    for args in [&["--help"][..], &["--version"][..], &["two-user-sweep", "--help"][..]] {
        let out = cdrsim(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
    }
    assert!(stdout(&cdrsim(&["--help"])).contains("two-user-sweep"));
}

#[test]
fn usage_errors_exit_one() {
    let cases: &[&[&str]] = &[
        &["two-user-sweep", "--nope"],
        &["no-such-subcommand"],
        &["multi-user-compare", "--k", "ten"],
        &["multi-user-compare", "--scheduler", "BOGUS"],
    ];
    for args in cases {
        let out = cdrsim(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn invalid_prioritizing_grid_exits_one_with_diagnostic() {
    let out = cdrsim(&["two-user-sweep", "--sessions", "10", "--lambda-grid", "1.0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("prioritizing factor"));
}

#[test]
fn unwritable_output_exits_one_with_diagnostic() {
    let out = cdrsim(&[
        "two-user-sweep",
        "--sessions",
        "10",
        "--out",
        "/nonexistent-dir/rows.csv",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("cannot write"));
}

// ======================================================================
// Two-user sweep output
// ======================================================================

#[test]
fn sweep_emits_the_documented_schema_and_is_byte_deterministic() {
    let path = temp_path("sweep.csv");
    let again = temp_path("sweep-again.csv");
    let run = |p: &PathBuf| {
        let out = cdrsim(&[
            "two-user-sweep",
            "--sessions",
            "100",
            "--seed",
            "5",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    };
    run(&path);
    run(&again);
    let a = std::fs::read(&path).unwrap();
    assert_eq!(a, std::fs::read(&again).unwrap());

    let text = String::from_utf8(a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "lambda,scheme,rate_relayed_mean,rate_direct_mean,sum_mean,std_err"
    );
    // Default grid: 9 factors x 5 schemes.
    assert_eq!(lines.len(), 1 + 45);
    assert!(lines[1].starts_with("-0.8,REF,"));
    assert!(lines[45].starts_with("0.8,S4,"));
    assert!(text.ends_with('\n'));
}

#[test]
fn sweep_jsonl_rows_parse() {
    let out = cdrsim(&[
        "two-user-sweep",
        "--sessions",
        "20",
        "--lambda-grid",
        "0",
        "--format",
        "jsonl",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    for line in lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        for key in [
            "lambda",
            "scheme",
            "rate_relayed_mean",
            "rate_direct_mean",
            "sum_mean",
            "std_err",
        ] {
            assert!(v.get(key).is_some(), "{key} missing in {line}");
        }
    }
}

// ======================================================================
// Multi-user comparison output
// ======================================================================

#[test]
fn compare_emits_one_row_per_discipline() {
    let out = cdrsim(&["multi-user-compare", "--k", "2", "--sessions", "30"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "scheduler,k,pu,lambda,snr_db,mean_throughput,std_err,sessions"
    );
    assert_eq!(lines.len(), 1 + 6);
    let labels: Vec<&str> = lines[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(
        labels,
        ["REFERENCE", "FIXED_S12", "FIXED_S34", "EXHAUSTIVE", "BDCDR", "BRCDR"]
    );
    for line in &lines[1..] {
        assert!(line.contains(",2,0.5,0,10,"));
        assert!(line.ends_with(",30"));
    }
}

#[test]
fn compare_respects_the_scheduler_filter() {
    let out = cdrsim(&[
        "multi-user-compare",
        "--k",
        "2",
        "--sessions",
        "20",
        "--scheduler",
        "EXHAUSTIVE,REFERENCE",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let labels: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(labels, ["EXHAUSTIVE", "REFERENCE"]);
}

// ======================================================================
// Validation battery
// ======================================================================

#[test]
fn validate_passes_on_a_fresh_build() {
    let out = cdrsim(&["validate", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("all 6 checks passed"));
    assert_eq!(text.matches(": PASS").count(), 6);
    assert!(!text.contains(": FAIL"));
}
