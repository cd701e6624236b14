//! End-to-end tests of the `treewalk` binary: exit codes, output format,
//! determinism and error reporting.

use std::path::PathBuf;
use std::process::{Command, Output};

fn treewalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treewalk")).args(args).output().expect("spawn treewalk")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf-8 stderr")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

const FREE_HEADER: &str = r#"[model]
kind = "free_product"
name = "scratch"

[free_product]
factors = [2, 2, 2]
names = ["a", "b", "c"]
"#;

fn write_config(name: &str, steps: &str) -> PathBuf {
    let path = scratch(name);
    std::fs::write(&path, format!("{FREE_HEADER}\n{steps}")).unwrap();
    path
}

/// Data rows of a CSV report, without `#` comments and the header line.
fn rows(text: &str) -> Vec<Vec<String>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    rdr.records().map(|r| r.unwrap().iter().map(str::to_string).collect()).collect()
}

#[test]
fn oracle_reports_exact_return_probabilities() {
    let o = treewalk(&["oracle", "stock:srw_colored", "r", "r", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("# treewalk "));
    let r = rows(&text);
    assert_eq!(r.len(), 7);
    assert_eq!(r[0][1], "1");
    assert_eq!(r[2][1], "1/3");
    assert_eq!(r[4][1], "5/27");
    assert_eq!(r[6][1], "29/243");
    assert!(r.iter().step_by(2).skip(1).all(|row| row[1] != "0"));
    assert!(r.iter().skip(1).step_by(2).all(|row| row[1] == "0"));
}

#[test]
fn free_and_colored_presentations_agree() {
    let free = rows(&stdout(&treewalk(&["oracle", "stock:srw_free", "e", "e", "10"])));
    let colored = rows(&stdout(&treewalk(&["oracle", "stock:srw_colored", "r", "r", "10"])));
    let exact = |r: &Vec<Vec<String>>| r.iter().map(|row| row[1].clone()).collect::<Vec<_>>();
    assert_eq!(exact(&free), exact(&colored));
}

#[test]
fn validate_passes_on_colored_srw() {
    let o = treewalk(&["validate", "stock:srw_colored"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}{}", stderr(&o));
    let r = rows(&text);
    assert!(r.len() >= 10);
    for row in &r {
        assert_eq!(row[1], "PASS", "{row:?}");
    }
}

#[test]
fn validate_rejects_shifted_srw() {
    let o = treewalk(&["validate", "stock:srw_shifted"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let r = rows(&stdout(&o));
    let residue = r.iter().find(|row| row[0] == "residue_classes").expect("residue row");
    assert_eq!(residue[1], "FAIL");
    assert!(residue[2].contains("r = 1"), "{residue:?}");
}

#[test]
fn golden_rational_coordinate_of_the_polynomial_model() {
    let o = treewalk(&["asympt", "stock:green_poly", "--coordinates"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let row =
        rows(&text).into_iter().find(|row| row[0] == "(r.0.1.0.0.2,r.0.1.0.0)_r.0").expect("golden coordinate row");
    assert_eq!(row[2], "pole");
    assert_eq!(row[3], "2");
    assert!(row[14].contains("(4/9*z^2) / (1 + -2/3*z + 1/9*z^2)"), "{row:?}");
}

#[test]
fn malformed_probability_is_a_parse_error_with_line() {
    let path = write_config("zero_den.toml", "[[step]]\nword = \"a\"\np = \"1/0\"\n");
    let o = treewalk(&["info", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("line 11"), "{err}");
    assert!(err.contains("1/0"), "{err}");
}

#[test]
fn model_errors_exit_with_two() {
    // Probabilities sum to 2/3.
    let path =
        write_config("deficient.toml", "[[step]]\nword = \"a\"\np = \"1/3\"\n\n[[step]]\nword = \"b\"\np = \"1/3\"\n");
    let o = treewalk(&["info", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));

    let o = treewalk(&["info", "stock:no_such_model"]);
    assert_eq!(o.status.code(), Some(2));

    let o = treewalk(&["info", scratch("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["frobnicate"][..],
        &["oracle", "stock:srw_free", "e", "e", "many"],
        &["oracle", "stock:srw_free", "e", "e", "4", "--restricted", "ball"],
        &["oracle", "stock:srw_free", "e", "zz", "4"],
        &["green", "stock:srw_free", "e", "e", "0.5+"],
        &["green", "stock:srw_free", "e", "e", "2"],
        &["radius", "stock:srw_free", "--precision", "64"],
        &["radius", "stock:srw_free", "--tol", "identity"],
        &["radius", "stock:srw_free", "--tol", "identity=-1"],
        &["radius", "stock:srw_free", "--budget", "no_such_budget=3"],
        &["asympt", "stock:srw_free", "e"],
    ] {
        let o = treewalk(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
    assert_eq!(treewalk(&["--help"]).status.code(), Some(0));
}

#[test]
fn exhausted_budget_exits_with_three() {
    let o = treewalk(&["oracle", "stock:srw_free", "e", "e", "30", "--budget", "oracle_states=100"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("budget"));
}

#[test]
fn reports_are_deterministic() {
    let a = treewalk(&["radius", "stock:mu"]);
    let b = treewalk(&["radius", "stock:mu"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let path = scratch("radius.csv");
    let _ = std::fs::remove_file(&path);
    let o = treewalk(&["radius", "stock:srw_free", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let written = std::fs::read(&path).unwrap();
    assert_eq!(written, treewalk(&["radius", "stock:srw_free"]).stdout);
}

#[test]
fn green_at_the_radius_matches_closed_form() {
    let o = treewalk(&["green", "stock:srw_free", "e", "a", "R", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = rows(&stdout(&o));
    let at_r = |channel: &str| {
        r.iter()
            .find(|row| row[2] == channel && (row[0].parse::<f64>().unwrap() - 3.0 / 8f64.sqrt()).abs() < 1e-9)
            .unwrap_or_else(|| panic!("{channel} row at R"))
            .clone()
    };
    let g: f64 = at_r("full")[3].parse().unwrap();
    let f: f64 = at_r("first_passage")[3].parse().unwrap();
    // G_R(e, a) = F_R(e, a) G_R(a, a) with G_R(e, e) = 4 and F_R = 1/sqrt(2).
    assert!((f - 0.5f64.sqrt()).abs() < 1e-8, "F = {f}");
    assert!((g - 4.0 * 0.5f64.sqrt()).abs() < 1e-7, "G = {g}");
}

#[test]
fn info_lists_the_coordinates() {
    let o = treewalk(&["info", "stock:mu"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = rows(&stdout(&o));
    assert!(r.iter().any(|row| row[0] == "summary"));
    assert!(r.iter().any(|row| row[0] == "coordinate"));
}
