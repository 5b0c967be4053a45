use std::process::{Command, Output};

use serde_json::Value;

fn gamow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gamow")).args(args).output().expect("gamow binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Data lines of a CSV artifact, header first.
fn csv_body(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn poles_csv_has_fifty_certified_rows() {
    let out = gamow(&["poles"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("# truncation_N = 50\n"));
    assert!(text.contains("# lambda = 6.0\n"));
    let body = csv_body(&text);
    assert_eq!(body[0][..5], ["n", "re_k", "im_k", "residual", "iterations"]);
    assert_eq!(body.len(), 51);
    for (i, row) in body[1..].iter().enumerate() {
        assert_eq!(row[0], (i + 1).to_string());
        let residual: f64 = row[3].parse().unwrap();
        assert!(residual < 1e-12, "n = {}: {residual}", i + 1);
    }
    let re1: f64 = body[1][1].parse().unwrap();
    let im1: f64 = body[1][2].parse().unwrap();
    assert!((re1 - 2.7579383212949245).abs() < 1e-13);
    assert!((im1 + 0.14043273246623328).abs() < 1e-13);
}

#[test]
fn json_output_embeds_the_configuration() {
    let out = gamow(&["--format", "json", "--truncation", "5", "poles"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["config"]["truncation_N"], 5);
    assert_eq!(v["config"]["output"]["format"], "json");
    let rows = v["rows"].as_array().expect("rows array");
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0]["n"], 1);
}

#[test]
fn tailfit_reports_inverse_cube_for_nonescape() {
    let out = gamow(&["tailfit", "--series", "P"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let fits = v["fits"].as_array().unwrap();
    assert_eq!(fits.len(), 1);
    assert_eq!(fits[0]["series"], "P");
    let slope = fits[0]["slope"].as_f64().unwrap();
    assert!((-3.1..=-2.9).contains(&slope), "{slope}");
}

#[test]
fn negative_strength_is_a_config_error() {
    let out = gamow(&["--lambda", "-1", "poles"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("strength"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "truncation_N = 10\nbogus = 1\n").unwrap();
    let out = gamow(&["--config", path.to_str().unwrap(), "poles"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("bogus"), "{err}");
}

#[test]
fn config_file_values_are_used_and_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "truncation_N = 3\n[model]\nlambda = 10.0\nR = 2.0\n").unwrap();
    let out = gamow(&["--config", path.to_str().unwrap(), "poles"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("# lambda = 10.0\n"));
    assert!(text.contains("# R = 2.0\n"));
    assert_eq!(csv_body(&text).len(), 4);
}

#[test]
fn written_file_matches_standard_output() {
    let dir = tempfile::tempdir().unwrap();
    let piped = gamow(&["sumrules"]);
    assert_eq!(piped.status.code(), Some(0), "{}", stderr(&piped));
    let out = Command::new(env!("CARGO_BIN_EXE_gamow"))
        .current_dir(dir.path())
        .args(["sumrules", "-o", "s.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let strip = |t: &str| t.lines().filter(|l| !l.starts_with("# path")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&written), strip(&stdout(&piped)));
}

#[test]
fn unreadable_config_is_a_config_error() {
    let out = gamow(&["--config", "/nonexistent/run.toml", "poles"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr(&out).lines().count(), 1);
}

#[test]
fn oracle_compare_columns() {
    let out = gamow(&["oracle-compare"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let body = csv_body(&stdout(&out));
    assert_eq!(body[0], ["t", "P_cn", "P_expansion", "rel_diff", "S_cn", "S_expansion"]);
    for row in &body[1..] {
        let rel: f64 = row[3].parse().unwrap();
        assert!(rel <= 0.05, "{row:?}");
    }
}
