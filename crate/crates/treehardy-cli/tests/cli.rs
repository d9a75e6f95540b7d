//! End-to-end command behaviour: exit statuses, file formats, pipelines.

use std::fs;
use std::process::{Command, Output};

use tempfile::tempdir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_treehardy"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary spawns")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn gen_tree_writes_expected_levels() {
    let out = run(&["gen-tree", "--homogeneous", "3", "--depth", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("tree v1\ndepth 4\n"));
    // c = [1, 3, 6, 12, 24]
    let level4 = text.lines().nth(5).unwrap();
    assert_eq!(level4.split_whitespace().count(), 2 + 24);

    let out = run(&["gen-tree", "--homogeneous", "2", "--depth", "2"]);
    assert_eq!(stdout(&out), "tree v1\ndepth 2\nlevel 1: 0 0\nlevel 2: 0 1\n");
}

#[test]
fn gen_tree_invalid_degree_is_usage_error() {
    let out = run(&["gen-tree", "--homogeneous", "1", "--depth", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("degree"));
}

#[test]
fn norm_pipeline_from_files() {
    let dir = tempdir().unwrap();
    let tree_path = dir.path().join("t.tree");
    let func_path = dir.path().join("f.func");

    let out = run(&[
        "gen-tree",
        "--homogeneous",
        "3",
        "--depth",
        "3",
        "--out",
        tree_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    // chi at level 2 of the 3-homogeneous tree: 1-norm 1/6, sup norm 1.
    fs::write(&func_path, "func v1\n2 1 1 0\n").unwrap();
    let out = run(&[
        "norm",
        "--tree",
        tree_path.to_str().unwrap(),
        "--symbol",
        func_path.to_str().unwrap(),
        "--p",
        "1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("norm = 0.16666666666666666 (exact)"), "{text}");

    let out = run(&[
        "norm",
        "--tree",
        tree_path.to_str().unwrap(),
        "--symbol",
        func_path.to_str().unwrap(),
        "--p",
        "inf",
    ]);
    assert!(stdout(&out).contains("norm = 1 (exact)"));
}

#[test]
fn norm_machine_mode_is_json() {
    let out = run(&[
        "norm",
        "--homogeneous",
        "2",
        "--depth",
        "3",
        "--gen",
        "constant,1",
        "--p",
        "2",
        "--machine",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["norm"], 1.0);
    assert_eq!(v["exactness"]["truncated"]["depth"], 3);
}

#[test]
fn parse_errors_exit_2_with_line_numbers() {
    let dir = tempdir().unwrap();
    let tree_path = dir.path().join("bad.tree");
    fs::write(&tree_path, "tree v1\ndepth 2\nlevel 1: 0 0\nlevel 2: 0 9\n").unwrap();
    let out = run(&[
        "norm",
        "--tree",
        tree_path.to_str().unwrap(),
        "--gen",
        "constant,1",
        "--p",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let func_path = dir.path().join("bad.func");
    fs::write(&func_path, "func v1\n0 0 1 oops\n").unwrap();
    let out = run(&[
        "norm",
        "--homogeneous",
        "2",
        "--depth",
        "2",
        "--symbol",
        func_path.to_str().unwrap(),
        "--p",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    let out = run(&[
        "norm",
        "--tree",
        "/nonexistent/nothing.tree",
        "--gen",
        "constant,1",
        "--p",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn homogeneous_shorthand_file_accepted() {
    let dir = tempdir().unwrap();
    let tree_path = dir.path().join("short.tree");
    fs::write(&tree_path, "homogeneous 3 2\n").unwrap();
    let out = run(&[
        "norm",
        "--tree",
        tree_path.to_str().unwrap(),
        "--gen",
        "constant,2",
        "--p",
        "inf",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("norm = 2"));
}

#[test]
fn usage_errors_exit_1() {
    // Missing tree source entirely.
    let out = run(&["norm", "--gen", "constant,1", "--p", "2"]);
    assert_eq!(out.status.code(), Some(1));

    // Both symbol sources at once is a clap conflict.
    let out = run(&[
        "norm",
        "--homogeneous",
        "2",
        "--depth",
        "2",
        "--gen",
        "constant,1",
        "--symbol",
        "x.func",
        "--p",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1));

    // Invalid exponent.
    let out = run(&[
        "norm",
        "--homogeneous",
        "2",
        "--depth",
        "2",
        "--gen",
        "constant,1",
        "--p",
        "-3",
    ]);
    assert_eq!(out.status.code(), Some(1));

    // analyze with zero trials.
    let out = run(&[
        "analyze",
        "--homogeneous",
        "2",
        "--depth",
        "2",
        "--gen",
        "constant,1",
        "--p",
        "2",
        "--q",
        "2",
        "--trials",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(1));

    // check with zero trials.
    let out = run(&[
        "check",
        "--homogeneous",
        "2",
        "--depth",
        "2",
        "--trials",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("gen-tree"));
}

#[test]
fn analyze_text_mentions_case_rule() {
    let out = run(&[
        "analyze",
        "--homogeneous",
        "3",
        "--depth",
        "5",
        "--gen",
        "constant,2",
        "--p",
        "2",
        "--q",
        "1",
        "--trials",
        "16",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("case: DOWN"), "{text}");
    assert!(text.contains("rule:"), "{text}");
    assert!(text.contains("never-onto"), "{text}");
}

#[test]
fn analyze_impossibility_tokens_for_mixed_exponents() {
    let out = run(&[
        "analyze",
        "--homogeneous",
        "3",
        "--depth",
        "5",
        "--gen",
        "level-decay",
        "--p",
        "1",
        "--q",
        "2",
        "--trials",
        "8",
    ]);
    let text = stdout(&out);
    assert!(text.contains("isometry: impossible-by-theorem (case 4)"), "{text}");
    assert!(text.contains("invertibility: impossible-by-theorem"), "{text}");
}

#[test]
fn witness_output_feeds_back_as_symbol() {
    let dir = tempdir().unwrap();
    let witness_path = dir.path().join("w.func");
    let out = run(&[
        "witness",
        "--homogeneous",
        "3",
        "--depth",
        "4",
        "--gen",
        "random,5",
        "--p",
        "2",
        "--q",
        "1",
        "--level",
        "2",
    ]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("attained: true"));
    fs::write(&witness_path, stdout(&out)).unwrap();

    // The witness is a valid func v1 file with unit 2-norm.
    let out = run(&[
        "norm",
        "--homogeneous",
        "3",
        "--depth",
        "4",
        "--symbol",
        witness_path.to_str().unwrap(),
        "--p",
        "2",
        "--machine",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let norm = v["norm"].as_f64().unwrap();
    assert!((norm - 1.0).abs() < 1e-12, "witness norm {norm}");
}

#[test]
fn witness_machine_reports_level_and_ratio() {
    let out = run(&[
        "witness",
        "--homogeneous",
        "3",
        "--depth",
        "3",
        "--gen",
        "constant,2",
        "--p",
        "inf",
        "--q",
        "1",
        "--level",
        "3",
        "--machine",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["case"], "FROM_INF");
    assert_eq!(v["witness_level"], 3);
    assert_eq!(v["attained"], true);
    assert_eq!(v["function"].as_array().unwrap().len(), 12);
}

#[test]
fn check_passes_and_corrupt_fails() {
    let out = run(&[
        "check",
        "--homogeneous",
        "3",
        "--depth",
        "4",
        "--trials",
        "40",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("failed     0"));

    let out = run(&[
        "check",
        "--homogeneous",
        "3",
        "--depth",
        "4",
        "--trials",
        "40",
        "--seed",
        "7",
        "--corrupt",
    ]);
    assert_eq!(out.status.code(), Some(3));

    let out = run(&[
        "check",
        "--homogeneous",
        "3",
        "--depth",
        "3",
        "--trials",
        "10",
        "--machine",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["suites"].as_array().unwrap().len(), 5);
}

#[test]
fn tree_file_and_in_memory_agree() {
    let dir = tempdir().unwrap();
    let tree_path = dir.path().join("t.tree");
    let out = run(&[
        "gen-tree",
        "--homogeneous",
        "3",
        "--depth",
        "5",
        "--out",
        tree_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let from_file = run(&[
        "analyze",
        "--tree",
        tree_path.to_str().unwrap(),
        "--gen",
        "random,9",
        "--p",
        "2",
        "--q",
        "2",
        "--seed",
        "3",
        "--trials",
        "16",
        "--machine",
    ]);
    let in_memory = run(&[
        "analyze",
        "--homogeneous",
        "3",
        "--depth",
        "5",
        "--gen",
        "random,9",
        "--p",
        "2",
        "--q",
        "2",
        "--seed",
        "3",
        "--trials",
        "16",
        "--machine",
    ]);
    assert_eq!(stdout(&from_file), stdout(&in_memory));
}
