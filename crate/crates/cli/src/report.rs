//! In-memory experiment results and their on-disk form.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value as Json};

use crate::config::Params;
use crate::error::CliError;

/// Version of the CSV column sets; bump when any header changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub file: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: &str, columns: &[&str]) -> Self {
        Self { file: file.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Values of one column parsed as floats.
    pub fn column_f64(&self, name: &str) -> Vec<f64> {
        let i = self.columns.iter().position(|c| c == name).unwrap_or_else(|| panic!("no column `{name}`"));
        self.rows.iter().map(|r| r[i].parse().unwrap_or(f64::NAN)).collect()
    }
}

/// Shortest round-trip text for a float; scientific for tiny and huge values.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub tables: Vec<Table>,
    pub metrics: BTreeMap<String, Json>,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn metric(&mut self, key: &str, value: impl Into<Json>) {
        self.metrics.insert(key.into(), value.into());
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(CheckResult { name: name.into(), passed, detail: detail.into() });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn metric_f64(&self, key: &str) -> f64 {
        self.metrics.get(key).and_then(Json::as_f64).unwrap_or_else(|| panic!("no numeric metric `{key}`"))
    }

    pub fn table(&self, file: &str) -> &Table {
        self.tables.iter().find(|t| t.file == file).unwrap_or_else(|| panic!("no table `{file}`"))
    }

    pub fn summary_json(&self, experiment: &str, seed: u64, params: &Params) -> Json {
        let schema: serde_json::Map<String, Json> =
            self.tables.iter().map(|t| (t.file.clone(), json!(t.columns))).collect();
        json!({
            "experiment": experiment,
            "seed": seed,
            "params": params.to_json(),
            "metrics": self.metrics,
            "checks": self.checks.iter().map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail})).collect::<Vec<_>>(),
            "passed": self.passed(),
            "schema": {"version": SCHEMA_VERSION, "tables": schema},
        })
    }
}

fn io(path: &Path, e: impl ToString) -> CliError {
    CliError::Io { path: path.display().to_string(), message: e.to_string() }
}

/// Writes every table as CSV plus `summary.json` and `provenance.json`.
///
/// Only `provenance.json` depends on the wall clock.
pub fn write_outputs(dir: &Path, experiment: &str, seed: u64, threads: usize, params: &Params, report: &Report) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    for t in &report.tables {
        let path = dir.join(&t.file);
        let mut w = csv::Writer::from_path(&path).map_err(|e| io(&path, e))?;
        w.write_record(&t.columns).map_err(|e| io(&path, e))?;
        for r in &t.rows {
            w.write_record(r).map_err(|e| io(&path, e))?;
        }
        w.flush().map_err(|e| io(&path, e))?;
    }
    let write_json = |name: &str, v: &Json| -> Result<(), CliError> {
        let path = dir.join(name);
        let mut text = serde_json::to_string_pretty(v).expect("json values serialize");
        text.push('\n');
        fs::write(&path, text).map_err(|e| io(&path, e))
    };
    write_json("summary.json", &report.summary_json(experiment, seed, params))?;
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    write_json(
        "provenance.json",
        &json!({
            "toolkit": "qsim",
            "version": env!("CARGO_PKG_VERSION"),
            "experiment": experiment,
            "seed": seed,
            "threads": threads,
            "timestamp_unix": stamp,
        }),
    )
}
