use std::f64::consts::PI;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swapping"))
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn value(text: &str, key: &str) -> f64 {
    let line = text.lines().find_map(|l| l.strip_prefix(&format!("{}=", key))).unwrap();
    line.parse().unwrap()
}

const POINTS: &str = "tests/data/points.txt";
const REP: &str = "tests/data/rep.txt";
const OPER: &str = "tests/data/veronese3.txt";

#[test]
fn bracket_of_generators() {
    let o = run(&["bracket", "--config", POINTS, "[X x]", "[Y y]"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "[X y]*[Y x]");
}

#[test]
fn input_errors_exit_2() {
    let o = run(&["bracket", "--config", POINTS, "[X z]", "[Y y]"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown label"));
    let o = run(&["bracket", "--config", POINTS, "[X x", "[Y y]"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 1, column 5"), "{}", stderr(&o));
    let o = run(&["bracket", "--config", "tests/data/missing.txt", "[X x]", "[Y y]"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn jacobi_and_identities() {
    let o = run(&["jacobi", "--config", POINTS, "[X x]", "[Y y]", "[X y]*[Y x]"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("jacobiator = 0"));
    let o = run(&["identities", "--config", POINTS]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(value(&stdout(&o), "failures"), 0.0);
}

#[test]
fn period_and_eval() {
    let o = run(&["period", "--config", REP, "g", "k+"]);
    assert_eq!(o.status.code(), Some(0));
    // g = diag(2, 1/2): width log 4.
    assert!((value(&stdout(&o), "width") - 4f64.ln()).abs() < 1e-12);
    let o = run(&["eval", "--config", REP, "cross(g+,h+,g-,h-)"]);
    assert_eq!(o.status.code(), Some(0));
    // Fixed points inf, 1, 0, -1.
    assert!((stdout(&o).trim().parse::<f64>().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn wolpert_perpendicular_axes() {
    let o = run(&["wolpert", "--config", REP, "g", "h"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(value(&stdout(&o), "sum").abs() < 1e-9);
}

#[test]
fn oper_weak_cross_ratio() {
    let o = run(&["oper", "--config", OPER, "--points", "0.1,0.3,0.6,0.8"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("holonomy_class=trivial-in-PSL"));
    // Veronese curve of order 3: the square of the classical sine cross ratio.
    let s = |a: f64, b: f64| (PI * (a - b)).sin();
    let b2 = s(0.1, 0.3) * s(0.6, 0.8) / (s(0.6, 0.3) * s(0.1, 0.8));
    assert!((value(&text, "weak_cross_ratio") - b2 * b2).abs() < 1e-7);
    assert_eq!(run(&["oper", "--config", OPER, "--steps", "63"]).status.code(), Some(2));
    assert_eq!(run(&["oper", "--config", OPER, "--points", "0.1,0.2"]).status.code(), Some(2));
}

#[test]
fn verify_suites() {
    let o = run(&["verify", "jacobi", "--size", "5", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("status=pass") && text.contains("seed=3"));
    assert_eq!(text, stdout(&run(&["verify", "jacobi", "--size", "5", "--seed", "3"])));
    let o = run(&["verify", "period-width", "--size", "5", "--tolerance", "1e-300"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("status=fail"));
    assert_eq!(run(&["verify", "nope"]).status.code(), Some(2));
}
