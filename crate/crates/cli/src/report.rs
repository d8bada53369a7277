//! Verification reports and CSV plot data.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub name: String,
    pub pass: bool,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub results: Vec<Record>,
    pub summary: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            results: Vec::new(),
            summary: BTreeMap::new(),
            details: Value::Null,
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) {
        self.inputs.insert(key.to_string(), value.into());
    }

    pub fn summary(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    pub fn record(&mut self, name: impl Into<String>, pass: bool, margin: f64) {
        self.results.push(Record {
            name: name.into(),
            pass,
            margin,
        });
    }

    /// Records a check that passes iff `margin >= 0`.
    pub fn check(&mut self, name: impl Into<String>, margin: f64) {
        self.record(name, margin >= 0.0, margin);
    }

    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    /// Adds the pass/fail totals to the summary.
    pub fn finish(mut self) -> Self {
        let failures = self.results.iter().filter(|r| !r.pass).count();
        self.summary("checks", self.results.len());
        self.summary("failures", failures);
        self.summary("passed", failures == 0);
        self
    }
}

/// 17 significant digits, enough to reproduce every `f64` exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            writer.write_record(row).expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("ascii csv")
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        crate::files::write_text(path, &self.to_csv())
    }
}

pub const SANDWICH_COLUMNS: [&str; 6] = [
    "vertex_id",
    "source_norm",
    "approx_norm",
    "ratio",
    "lower_margin",
    "upper_margin",
];
pub const SMOOTH_COLUMNS: [&str; 5] = ["sample_id", "base", "smooth", "ratio", "grad_rel_err"];
pub const EXPOSED_COLUMNS: [&str; 8] = [
    "point_id",
    "source_index",
    "negated",
    "radius",
    "n_f",
    "m_f",
    "class_radius",
    "support_radius",
];
