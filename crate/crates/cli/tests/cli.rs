use std::process::{Command, Output};

fn mulewalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mulewalk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = mulewalk(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn table2_prints_published_cells() {
    let text = stdout(&["table2"]);
    let row3 = text
        .lines()
        .find(|l| l.trim_start().starts_with("3 |"))
        .unwrap();
    assert!(row3.contains("0.6883"), "{row3}");
    assert_eq!(text.lines().count(), 13);
}

#[test]
fn csv_is_byte_deterministic() {
    let args = ["table3", "--width", "6", "--rounds", "5", "--output", "csv"];
    let a = mulewalk(&args);
    let b = mulewalk(&args);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("N,pos/width,relative_distance"));
    assert_eq!(text.lines().count(), 1 + 6 * 6);
}

#[test]
fn out_writes_csv_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let path = path.to_str().unwrap();
    let printed = stdout(&[
        "figure7", "--width", "8", "--rounds", "4", "--probs", "0,1/2,1", "--out", path,
    ]);
    assert!(printed.is_empty());
    let csv = std::fs::read_to_string(path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "prob,relative_distance");
    assert_eq!(lines[1], "0,0.000000000000");
    assert_eq!(lines[3], "1,0.875000000000");
}

#[test]
fn eval_exact_closed_form() {
    let text = stdout(&[
        "eval",
        "--model",
        "closed-form",
        "--broken",
        "2",
        "--mode",
        "exact",
    ]);
    assert_eq!(text, "0.6333 (19/30)\n");
    let csv = stdout(&[
        "eval",
        "--model",
        "natural-opt",
        "--prob",
        "1/10",
        "--width",
        "2",
        "--rounds",
        "3",
        "--output",
        "csv",
    ]);
    assert_eq!(
        csv,
        "model,width,broken,prob,init,rounds,relative_distance\nnatural-opt,2,,1/10,0,3,0.050000000000\n"
    );
}

#[test]
fn estimate_defaults() {
    let text = stdout(&["estimate"]);
    assert!(text.contains("relative distance     0.0761"), "{text}");
    assert!(text.contains("8.4 km"), "{text}");
}

#[test]
fn bisim_exports_quotients() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.txt");
    let text = stdout(&[
        "bisim",
        "--width",
        "2",
        "--prob",
        "1/10",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(text.contains("bisimilar: true"));
    let q = std::fs::read_to_string(&path).unwrap();
    assert!(q.starts_with("# natural\nP 0 9/10 1\n"), "{q}");
}

#[test]
fn bad_configuration_fails_with_one_line() {
    for args in [
        &["eval", "--model", "fixed-n"][..],
        &["eval", "--model", "natural", "--width", "4"][..],
        &["eval", "--model", "fixed-n", "--broken", "11"][..],
        &[
            "eval", "--model", "fixed-n", "--broken", "1", "--init", "10",
        ][..],
        &["estimate", "--hours", "0"][..],
    ] {
        let out = mulewalk(args);
        assert!(!out.status.success(), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.lines().count(), 1, "{args:?}: {err}");
        assert!(err.starts_with("error: "));
    }
    let out = mulewalk(&["eval", "--model", "natural", "--prob", "3/2"]);
    assert!(!out.status.success());
}
