//! Batch runner for `dense-equilibria` scenarios.
//!
//! A config file lists scenarios; each one is dispatched to the matching
//! solver or validator and produces one JSON record per line. Records carry
//! the scenario name, anchor text, effective grids, tolerances and seed, the
//! verdict, residuals, witnesses and the full report. Keys are sorted and no
//! timestamps are written, so reruns are byte-identical.

pub mod catalog;
pub mod config;
mod runner;

use std::io::Write;

use serde_json::Value;

pub use config::{parse, ConfigFile, Scenario, ScenarioKind};
pub use runner::run_scenario;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}", describe("configuration error", .scenario, .path, .message))]
    Config {
        scenario: Option<String>,
        path: String,
        message: String,
    },
    #[error("{}", describe("run error", &Some(.scenario.clone()), .path, &.source.to_string()))]
    Run {
        scenario: String,
        path: String,
        #[source]
        source: dense_equilibria::Error,
    },
    #[error("{0}")]
    Io(String),
}

fn describe(what: &str, scenario: &Option<String>, path: &str, message: &str) -> String {
    let mut out = what.to_string();
    if let Some(s) = scenario {
        out.push_str(&format!(" in scenario `{s}`"));
    }
    if !path.is_empty() {
        out.push_str(&format!(" at `{path}`"));
    }
    out.push_str(": ");
    out.push_str(message);
    out
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        1
    }
}

/// Overrides applied on top of every scenario.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub res: Option<f64>,
}

/// Records of a run, in scenario order, plus the expectation outcome.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub records: Vec<Value>,
    pub mismatches: Vec<String>,
}

impl RunOutput {
    pub fn exit_code(&self) -> i32 {
        if self.mismatches.is_empty() {
            0
        } else {
            2
        }
    }

    /// One JSON object per line.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("records are plain JSON"));
            out.push('\n');
        }
        out
    }

    pub fn write_to(&self, w: &mut impl Write) -> std::io::Result<()> {
        w.write_all(self.to_lines().as_bytes())
    }

    /// Short terminal summary, one line per record.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let met = match r["expectation"]["met"].as_bool() {
                Some(true) => "ok",
                Some(false) => "MISMATCH",
                None => "-",
            };
            let point = r.get("point").filter(|p| !p.is_null()).map(|p| format!(" at {p}")).unwrap_or_default();
            out.push_str(&format!(
                "[{met}] {} ({}): {}{point}\n",
                r["scenario"].as_str().unwrap_or("?"),
                r["kind"].as_str().unwrap_or("?"),
                r["verdict"].as_str().unwrap_or("?"),
            ));
        }
        out
    }
}

/// Runs every scenario of `cfg` in order.
pub fn run_config(cfg: &ConfigFile, opts: RunOptions) -> Result<RunOutput, CliError> {
    let mut out = RunOutput::default();
    for s in &cfg.scenarios {
        for record in run_scenario(s, cfg.seed, opts)? {
            if record["expectation"]["met"] == Value::Bool(false) {
                let why = record["expectation"]["failures"]
                    .as_array()
                    .map(|a| a.iter().filter_map(|v| v.as_str()).collect::<Vec<_>>().join("; "))
                    .unwrap_or_default();
                out.mismatches.push(format!("{}: {why}", s.name));
            }
            out.records.push(record);
        }
    }
    Ok(out)
}

/// Parses and runs config text.
pub fn run_text(text: &str, opts: RunOptions) -> Result<RunOutput, CliError> {
    run_config(&parse(text)?, opts)
}

/// Runs every bundled config in catalog order.
pub fn reproduce_paper(opts: RunOptions) -> Result<RunOutput, CliError> {
    let mut out = RunOutput::default();
    for b in catalog::BUNDLED {
        let part = run_text(b.text, opts)?;
        out.records.extend(part.records);
        out.mismatches.extend(part.mismatches);
    }
    Ok(out)
}

/// Resolves `target` as a file path, a bundled config name or a catalog
/// entry, in that order, and returns the config text.
pub fn load(target: &str) -> Result<String, CliError> {
    let path = std::path::Path::new(target);
    if path.exists() {
        return std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{target}: {e}")));
    }
    if let Some(b) = catalog::bundled(target) {
        return Ok(b.text.to_string());
    }
    if let Some(text) = catalog::entry_config(target) {
        return Ok(text);
    }
    Err(CliError::Io(format!(
        "{target}: no such file, bundled config or catalog entry"
    )))
}
