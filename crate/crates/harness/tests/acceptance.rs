//! Runs every acceptance criterion through the release binary and prints one line each.
//!
//! `verify all --seed 7` is executed twice; criteria 1-10 are read from the first report
//! together with their wall time, criterion 11 compares the two reports byte for byte.

use std::path::Path;
use std::process::Command;

use serde_json::Value;

/// (id, description, runtime budget in seconds)
const CRITERIA: &[(&str, &str, f64)] = &[
    ("C1", "symbol identity", 10.0),
    ("C2", "Feynman-Kac cross-check", 120.0),
    ("C3", "Schauder sweep", 300.0),
    ("C4", "space characterization", 120.0),
    ("C5", "conjugate inverse inequality", 1.0),
    ("C6", "Bernstein constant", 60.0),
    ("C7", "counterexample", 30.0),
    ("C8", "Krylov decay", 600.0),
    ("C9", "exit-time bound", 120.0),
    ("C10", "Morrey embeddings", 120.0),
];

fn run_verify(root: &Path) -> (Vec<u8>, String) {
    let status = Command::new(env!("CARGO_BIN_EXE_lowsing"))
        .args(["verify", "all", "--seed", "7", "--out"])
        .arg(root)
        .output()
        .expect("binary runs");
    let dir = root.join("verify");
    let report = std::fs::read(dir.join("report.json")).unwrap_or_else(|e| {
        panic!("no report ({e}); stderr:\n{}", String::from_utf8_lossy(&status.stderr))
    });
    let timing = std::fs::read_to_string(dir.join("timing.txt")).expect("timing file");
    (report, timing)
}

fn seconds(timing: &str, id: &str) -> Option<f64> {
    timing
        .lines()
        .filter_map(|l| l.split_once(' '))
        .find(|(k, _)| *k == id)
        .and_then(|(_, v)| v.trim().parse().ok())
}

fn main() {
    let first = tempfile::tempdir().expect("tempdir");
    let second = tempfile::tempdir().expect("tempdir");
    let (report, timing) = run_verify(first.path());
    let (again, _) = run_verify(second.path());
    let parsed: Value = serde_json::from_slice(&report).expect("report is JSON");
    let checks = parsed["checks"].as_array().expect("checks array");

    let mut failures = Vec::new();
    for (id, name, budget) in CRITERIA {
        let check = checks.iter().find(|c| c["id"] == *id);
        let passed = check.and_then(|c| c["passed"].as_bool()).unwrap_or(false);
        let elapsed = seconds(&timing, id).unwrap_or(f64::INFINITY);
        let in_time = elapsed <= *budget;
        let ok = passed && in_time;
        let tolerance = check.and_then(|c| c["tolerance"].as_str()).unwrap_or("missing");
        println!(
            "{} {id} {name}: {tolerance}; {elapsed:.2} s of {budget} s{}",
            if ok { "PASS" } else { "FAIL" },
            if passed { "" } else { "; criterion not met" }
        );
        if !ok {
            failures.push(*id);
        }
    }
    let identical = report == again;
    println!(
        "{} C11 determinism: two runs of verify all --seed 7 give byte-identical reports ({} bytes)",
        if identical { "PASS" } else { "FAIL" },
        report.len()
    );
    if !identical {
        failures.push("C11");
    }
    if !failures.is_empty() {
        eprintln!("failed criteria: {}", failures.join(", "));
        std::process::exit(1);
    }
}
