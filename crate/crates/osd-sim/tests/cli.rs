//! End-to-end checks of the compiled binary: flag parsing, exit codes, and
//! byte-identical CSV across worker counts.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_osd-sim"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn cost_subcommand_prints_golden_values() {
    let out = run(&["cost", "--n", "256", "--k", "128", "--blr", "64", "--alpha", "auto"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for needle in ["4,194,304", "786,432", "alpha = 34", "555,912"] {
        assert!(text.contains(needle), "missing {needle} in:\n{text}");
    }
}

#[test]
fn cost_fixed_alpha_notes_quoted_figure() {
    let out = run(&["cost", "--n", "256", "--k", "128", "--blr", "64", "--alpha", "32"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("557,056"));
    assert!(text.contains("559,992"));
}

#[test]
fn sim_csv_is_identical_across_worker_counts() {
    let base = [
        "sim",
        "--code",
        "bch:4,2",
        "--decoder",
        "staged",
        "--order",
        "1",
        "--snr",
        "2.0,3.0",
        "--frames",
        "1024",
        "--max-errors",
        "100000",
        "--seed",
        "9",
    ];
    let mut one = base.to_vec();
    one.extend(["--workers", "1"]);
    let mut eight = base.to_vec();
    eight.extend(["--workers", "8"]);
    let a = run(&one);
    let b = run(&eight);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("snr_db,frames,word_errors,ml_errors,wer,mld_lb_wer,ber,"));
    assert_eq!(text.trim_end().lines().count(), 3);
}

#[test]
fn sim_writes_csv_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = run(&[
        "sim",
        "--code",
        "bch:4,2",
        "--decoder",
        "classic",
        "--order",
        "0",
        "--snr",
        "3.0",
        "--frames",
        "64",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn inspect_reports_partition_stats() {
    let out = run(&["inspect", "--code", "bch:4,2", "--samples", "200"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("(15, 7)"));
    assert!(text.contains("B_K"));
    assert!(text.contains("|B_K,LR|"));
}

#[test]
fn config_errors_exit_1() {
    for args in [
        vec!["sim", "--code", "nonsense", "--decoder", "classic", "--snr", "1.0"],
        vec!["sim", "--code", "bch:4,2", "--decoder", "warp", "--snr", "1.0"],
        vec!["sim", "--code", "bch:4,2", "--decoder", "chase", "--snr", "1.0"],
        vec!["cost", "--n", "10", "--k", "20", "--blr", "0"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "args: {args:?}");
    }
}

#[test]
fn missing_file_exits_2() {
    let out = run(&[
        "sim",
        "--code",
        "file:/nonexistent/code.txt",
        "--decoder",
        "classic",
        "--snr",
        "1.0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn file_code_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("code.txt");
    std::fs::write(&path, "7 4\n1101000\n0110100\n0011010\n0001101\n").unwrap();
    let arg = format!("file:{}", path.display());
    let out = run(&[
        "sim", "--code", &arg, "--decoder", "classic", "--order", "1", "--snr", "4.0",
        "--frames", "128",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}
