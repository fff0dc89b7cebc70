use std::fs;

use delsarte_cli::run_with;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with(std::iter::once("delsarte").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn cell<'a>(table: &'a str, method: &str) -> Option<&'a str> {
    table.lines().find_map(|line| {
        let mut cells = line.split_whitespace();
        (cells.next() == Some(method)).then(|| cells.next()).flatten()
    })
}

#[test]
fn bound_all_for_the_seven_bit_code() {
    let (code, out, err) = run(&["bound", "--family", "hamming", "--n", "7", "--q", "2", "--d", "3", "--method", "all"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(cell(&out, "lp"), Some("16"), "{out}");
    assert_eq!(cell(&out, "hamming"), Some("16"), "{out}");
    assert!(cell(&out, "eb").is_some() && cell(&out, "mrrw").is_some(), "{out}");
}

#[test]
fn bound_dump_lists_every_point() {
    let (code, out, _) = run(&["bound", "--family", "hamming", "--n", "7", "--q", "2", "--d", "3", "--method", "hamming", "--dump"]);
    assert_eq!(code, 0);
    assert!(out.contains("\n0 8/1 64/1\n"), "{out}");
    assert_eq!(out.lines().filter(|l| l.split(' ').count() == 3 && !l.starts_with('#')).count(), 8);
}

#[test]
fn johnson_distance_is_halved() {
    // Hamming distance 4 between weight-2 words is Johnson distance 2.
    let (code, out, err) = run(&["bound", "--family", "johnson", "--n", "4", "--a", "2", "--d", "4", "--method", "eb"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("scheme distance d=2"), "{out}");
    assert!(out.contains("u=1, closed form 9"), "{out}");
    let (code, _, _) = run(&["bound", "--family", "johnson", "--n", "4", "--a", "2", "--d", "1"]);
    assert_eq!(code, 1);
    let (_, help, _) = run(&["bound", "--help"]);
    assert!(help.contains("halved"), "{help}");
}

#[test]
fn curve_writes_one_row_per_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("f.csv");
    let svg = dir.path().join("f.svg");
    let (code, _, err) = run(&[
        "curve", "--which", "gv,mrrw1", "--q", "2", "--grid", "101",
        "--out", csv.to_str().unwrap(), "--svg", svg.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("delta,gv,mrrw1_q"));
    assert_eq!(lines.count(), 101);
    assert!(fs::read_to_string(&svg).unwrap().contains("<polyline"));
}

#[test]
fn curve_domain_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("f.csv");
    let (code, _, err) = run(&["curve", "--which", "js_eb", "--grid", "5", "--out", csv.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("alpha"), "{err}");
}

#[test]
fn asymmetric_matrix_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "3 2\n0 1 1\n1 0 1\n2 1 0\n").unwrap();
    let (code, _, err) = run(&["scheme", "verify", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("symmetric"), "{err}");
}

#[test]
fn square_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let square = dir.path().join("square.txt");
    fs::write(&square, "4 2\n0 1 2 1\n1 0 1 2\n2 1 0 1\n1 2 1 0\n").unwrap();
    let (code, out, err) = run(&["scheme", "verify", square.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("Q-polynomial: yes"), "{out}");
}

#[test]
fn params_tables() {
    let (code, out, _) = run(&["params", "hamming", "--n", "3", "--q", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("|X| = 8"), "{out}");
    let (code, out, _) = run(&["params", "johnson", "--n", "4", "--a", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("Q-polynomial: yes"), "{out}");
}

#[test]
fn sandwich_and_oracle() {
    let (code, out, err) = run(&["sandwich", "--family", "hamming", "--n", "7", "--q", "2", "--d", "3"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.lines().any(|l| l.split_whitespace().take(3).eq(["16", "16", "16"])), "{out}");
    let (code, out, _) = run(&["oracle", "--family", "hamming", "--n", "5", "--q", "2", "--d", "3"]);
    assert_eq!(code, 0);
    assert!(out.contains("size 4 (maximum)"), "{out}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["bound", "--bogus"]).0, 1);
    assert_eq!(run(&[]).0, 1);
    assert_eq!(run(&["--help"]).0, 0);
}
