//! Run reports: deterministic JSON plus a separate timing file.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

/// The outcome of one check. `values` holds the measured quantities.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: String,
    pub title: String,
    pub passed: bool,
    pub tolerance: String,
    pub values: Value,
}

impl Check {
    pub fn new(id: &str, title: &str, passed: bool, tolerance: &str, values: Value) -> Self {
        Self {
            id: id.into(),
            title: title.into(),
            passed,
            tolerance: tolerance.into(),
            values,
        }
    }

    /// A check that could not be evaluated because a computation failed.
    pub fn failed(id: &str, title: &str, tolerance: &str, error: impl ToString) -> Self {
        Self::new(id, title, false, tolerance, serde_json::json!({ "error": error.to_string() }))
    }

    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.title)
    }
}

/// Everything a run produced except wall time, which would break byte-identical output.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub seed: u64,
    pub config: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub results: Value,
    pub passed: bool,
}

impl RunReport {
    pub fn new(command: &str, seed: u64, config: BTreeMap<String, String>, checks: Vec<Check>, results: Value) -> Self {
        Self {
            command: command.into(),
            seed,
            config,
            passed: checks.iter().all(|c| c.passed),
            checks,
            results,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values serialize");
        s.push('\n');
        s
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.to_json())
    }
}

/// `timing.txt`: one `label seconds` line per timed step.
pub fn write_timing(dir: &Path, timings: &[(String, Duration)]) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let text: String = timings
        .iter()
        .map(|(label, d)| format!("{label} {:.3}\n", d.as_secs_f64()))
        .collect();
    fs::write(dir.join("timing.txt"), text)
}
