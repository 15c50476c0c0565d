//! Report tables and the files they are written to.
//!
//! Every command writes `<command>.csv` plus a `<command>.json` sidecar, or a
//! single `<command>.json` with the table inlined, then `<command>.config.toml`
//! and `<command>.timing.json`.
//! Only the timing file varies between reruns.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use lcrit_core::measures::io::format_real;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Format;

pub const SCHEMA: &str = "lcrit-lab/1";

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Real(x) => format_real(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\r', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<u32> for Cell {
    fn from(n: u32) -> Self {
        Cell::Int(i64::from(n))
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Value,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Self {
            command: command.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: json!({}),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check { name: name.to_string(), passed, detail });
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn csv(&self, config_hash: &str, seed: u64) -> String {
        let mut text = String::new();
        write!(text, "# schema={SCHEMA}\r\n# command={}\r\n", self.command).unwrap();
        write!(text, "# config_hash={config_hash}\r\n# seed={seed}\r\n").unwrap();
        text.push_str(&self.columns.join(","));
        text.push_str("\r\n");
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            text.push_str(&cells.join(","));
            text.push_str("\r\n");
        }
        text
    }

    pub fn sidecar(&self, config_hash: &str, seed: u64, inline_table: bool) -> Value {
        let mut v = json!({
            "schema": SCHEMA,
            "command": self.command,
            "config_hash": config_hash,
            "seed": seed,
            "summary": self.summary,
            "checks": self.checks,
        });
        if inline_table {
            v["columns"] = json!(self.columns);
            v["rows"] = json!(self.rows);
        }
        v
    }

    /// Writes the report files and returns their paths.
    pub fn write(&self, dir: &Path, format: Format, config_hash: &str, seed: u64) -> std::io::Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        let json_path = dir.join(format!("{}.json", self.command));
        if format == Format::Csv {
            let csv_path = dir.join(format!("{}.csv", self.command));
            fs::write(&csv_path, self.csv(config_hash, seed))?;
            written.push(csv_path);
        }
        let sidecar = self.sidecar(config_hash, seed, format == Format::Json);
        fs::write(&json_path, pretty(&sidecar))?;
        written.push(json_path);
        Ok(written)
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

/// Wall-clock and worker count, kept apart so they never touch the results.
pub fn write_timing(dir: &Path, command: &str, seconds: f64, workers: usize) -> std::io::Result<()> {
    let v = json!({ "schema": SCHEMA, "command": command, "seconds": seconds, "workers": workers });
    fs::write(dir.join(format!("{command}.timing.json")), pretty(&v))
}
