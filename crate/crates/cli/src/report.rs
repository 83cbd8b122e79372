use crate::config::{ExperimentConfig, Format};
use serde::Serialize;
use serde_json::{Map, Value};
use std::fs;
use std::io;
use std::path::Path;

/// A CSV table; every row is prefixed with the config hash on output.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Table { name, columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn records(&self, hash: &str) -> Vec<Map<String, Value>> {
        self.rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                m.insert("config_hash".into(), Value::from(hash));
                for (c, v) in self.columns.iter().zip(r) {
                    m.insert((*c).into(), v.clone());
                }
                m
            })
            .collect()
    }
}

/// Finite numbers as JSON numbers, anything else as `null`.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Assertion { name: name.into(), passed, detail: detail.into() }
    }
}

/// What an experiment produces before it is tagged and written.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub summary: Value,
    pub assertions: Vec<Assertion>,
    /// Wall-clock seconds per case; kept out of the report so that reports
    /// stay bit-identical across runs.
    pub timings: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    /// Feeding this back to `fracfp run` reproduces the report.
    pub config_echo: String,
    pub tables: Map<String, Value>,
    pub summary: Value,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
}

impl ExperimentReport {
    pub fn new(cfg: &ExperimentConfig, outcome: &Outcome) -> Self {
        let hash = cfg.hash();
        let mut echo_cfg = cfg.clone();
        echo_cfg.output.dir = None;
        let tables = outcome
            .tables
            .iter()
            .map(|t| (t.name.to_string(), Value::from(t.records(&hash).into_iter().map(Value::Object).collect::<Vec<_>>())))
            .collect();
        ExperimentReport {
            experiment: cfg.experiment.to_string(),
            config_hash: hash,
            config: echo_cfg,
            config_echo: cfg.echo(),
            tables,
            summary: outcome.summary.clone(),
            assertions: outcome.assertions.clone(),
            passed: outcome.assertions.iter().all(|a| a.passed),
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn write_csv(path: &Path, table: &Table, hash: &str) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(std::iter::once("config_hash").chain(table.columns.iter().copied()))?;
    for row in &table.rows {
        w.write_record(std::iter::once(hash.to_string()).chain(row.iter().map(cell)))?;
    }
    w.flush()
}

/// Writes `report.json`, one CSV per table and `timing.json`; returns the
/// paths written.
pub fn write_all(dir: &Path, report: &ExperimentReport, outcome: &Outcome, format: Format) -> io::Result<Vec<String>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if format != Format::Csv {
        let p = dir.join("report.json");
        fs::write(&p, serde_json::to_string_pretty(report)? + "\n")?;
        written.push(p.display().to_string());
    }
    if format != Format::Json {
        for t in &outcome.tables {
            let p = dir.join(format!("{}.csv", t.name));
            write_csv(&p, t, &report.config_hash)?;
            written.push(p.display().to_string());
        }
    }
    let timing: Map<String, Value> = outcome.timings.iter().map(|(k, s)| (k.clone(), num(*s))).collect();
    let p = dir.join("timing.json");
    fs::write(&p, serde_json::to_string_pretty(&timing)? + "\n")?;
    written.push(p.display().to_string());
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_numbers_become_null() {
        assert_eq!(num(f64::NAN), Value::Null);
        assert_eq!(opt(None), Value::Null);
        assert_eq!(num(0.5), serde_json::json!(0.5));
        assert_eq!(cell(&Value::Null), "");
        assert_eq!(cell(&serde_json::json!("u0")), "u0");
        assert_eq!(cell(&num(1e-20)), "1e-20");
    }

    #[test]
    fn records_carry_the_hash() {
        let mut t = Table::new("t", &["a", "b"]);
        t.push(vec![num(1.0), Value::from("x")]);
        let r = t.records("abc");
        assert_eq!(r[0]["config_hash"], "abc");
        assert_eq!(r[0]["b"], "x");
    }
}
