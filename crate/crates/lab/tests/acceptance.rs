//! Acceptance suite: runs `gamow report` twice with the default
//! configuration, prints one line per criterion and fails unless every
//! criterion passes and both runs wrote identical bytes.

use std::process::{Command, ExitCode};

use serde_json::Value;

/// The output path is part of the echoed configuration, so both runs write
/// the same relative name from their own directory.
fn report(dir: &std::path::Path) -> (Vec<u8>, i32) {
    let path = dir.join("report.json");
    let out = Command::new(env!("CARGO_BIN_EXE_gamow"))
        .current_dir(dir)
        .args(["report", "--output", "report.json"])
        .output()
        .expect("gamow binary runs");
    let code = out.status.code().unwrap_or(-1);
    let bytes = std::fs::read(&path).unwrap_or_else(|_| {
        panic!("report wrote nothing; stderr:\n{}", String::from_utf8_lossy(&out.stderr))
    });
    (bytes, code)
}

fn describe(check: &Value) -> String {
    let mut s = check["name"].as_str().unwrap_or("?").to_string();
    if let Some(v) = check["value"].as_f64() {
        s.push_str(&format!(" {v:.4e}"));
    }
    s.push_str(&format!(" ({})", check["limit"].as_str().unwrap_or("")));
    if check["passed"] != Value::Bool(true) {
        s.push_str(" FAILED");
    }
    s
}

fn main() -> ExitCode {
    let dir_a = tempfile::tempdir().expect("temporary directory");
    let dir_b = tempfile::tempdir().expect("temporary directory");
    let (first, code_a) = report(dir_a.path());
    let (second, code_b) = report(dir_b.path());
    let identical = first == second;

    let doc: Value = serde_json::from_slice(&first).expect("report is JSON");
    let criteria = doc["acceptance"]["criteria"].as_array().expect("criteria array");
    let mut failures = 0;
    for c in criteria {
        let id = c["id"].as_u64().unwrap_or(0);
        let mut passed = c["passed"] == Value::Bool(true);
        let mut checks: Vec<String> = c["checks"].as_array().into_iter().flatten().map(describe).collect();
        if id == 10 {
            checks.push(format!("two `gamow report` runs (byte-identical){}", if identical { "" } else { " FAILED" }));
            passed &= identical;
        }
        if !passed {
            failures += 1;
        }
        println!(
            "[{}] criterion {:>2} {}: {}",
            if passed { "PASS" } else { "FAIL" },
            id,
            c["title"].as_str().unwrap_or("?"),
            checks.join("; ")
        );
        for note in c["notes"].as_array().into_iter().flatten() {
            println!("       note: {}", note.as_str().unwrap_or(""));
        }
    }
    let exit_consistent = (code_a == 0) == (failures == 0) && code_a == code_b;
    println!(
        "acceptance: {}/{} criteria passed; report exit codes {code_a}, {code_b}{}",
        criteria.len() - failures,
        criteria.len(),
        if exit_consistent { "" } else { " (inconsistent with results)" }
    );
    if failures == 0 && criteria.len() == 10 && exit_consistent {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
