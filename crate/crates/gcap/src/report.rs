//! Report envelope and its JSON and CSV renderings.
//!
//! JSON is canonical. CSV has one row per record with nested objects
//! flattened to dotted columns and arrays to 1-indexed suffixes
//! (`eta_1`, `eta_2`, ...).

use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use gcap_core::Tolerances;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ToleranceRecord {
    pub sym: f64,
    pub decomp: f64,
    pub phys: f64,
    pub opt: f64,
    pub opt_sup: f64,
    pub prefix_abs: f64,
    pub prefix_rel: f64,
}

impl From<&Tolerances> for ToleranceRecord {
    fn from(t: &Tolerances) -> Self {
        Self {
            sym: t.sym,
            decomp: t.decomp,
            phys: t.phys,
            opt: t.opt,
            opt_sup: t.opt_sup,
            prefix_abs: t.prefix_abs,
            prefix_rel: t.prefix_rel,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub tolerances: ToleranceRecord,
    /// Present only when timing was requested, so reports stay
    /// byte-identical across runs by default.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
    pub pass: bool,
    pub records: Vec<Value>,
}

impl Report {
    pub fn new(command: impl Into<String>, seed: u64, tol: &Tolerances) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            command: command.into(),
            seed,
            tolerances: tol.into(),
            wall_time_seconds: None,
            pass: true,
            records: Vec::new(),
        }
    }

    pub fn push<T: Serialize>(&mut self, record: &T) -> Result<()> {
        self.records.push(serde_json::to_value(record)?);
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn to_csv(&self) -> Result<String> {
        let header = [
            ("tool", Value::from(self.tool)),
            ("version", Value::from(self.version)),
            ("command", Value::from(self.command.clone())),
            ("seed", Value::from(self.seed)),
            ("pass", Value::from(self.pass)),
        ];
        let mut rows: Vec<Vec<(String, String)>> = Vec::with_capacity(self.records.len());
        for record in &self.records {
            let mut row: Vec<(String, String)> =
                header.iter().map(|(k, v)| (k.to_string(), scalar_text(v))).collect();
            flatten("", record, &mut row);
            rows.push(row);
        }
        let mut columns: Vec<String> = Vec::new();
        for row in &rows {
            for (k, _) in row {
                if !columns.contains(k) {
                    columns.push(k.clone());
                }
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&columns)?;
        for row in &rows {
            let cells = columns.iter().map(|c| {
                row.iter()
                    .find(|(k, _)| k == c)
                    .map(|(_, v)| v.as_str())
                    .unwrap_or("")
            });
            w.write_record(cells)?;
        }
        let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    /// Writes to `out`, or to standard output when `None`.
    pub fn write(&self, format: Format, out: Option<&Path>) -> Result<()> {
        let text = self.render(format)?;
        match out {
            Some(path) => std::fs::write(path, text).map_err(|source| CliError::Write {
                path: path.to_path_buf(),
                source,
            }),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .and_then(|_| stdout.flush())
                    .map_err(|source| CliError::Write {
                        path: "<stdout>".into(),
                        source,
                    })
            }
        }
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => flatten_object(prefix, map, out),
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten(&format!("{prefix}_{}", i + 1), item, out);
            }
        }
        scalar => out.push((prefix.to_string(), scalar_text(scalar))),
    }
}

fn flatten_object(prefix: &str, map: &Map<String, Value>, out: &mut Vec<(String, String)>) {
    for (k, v) in map {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        flatten(&key, v, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> Report {
        let mut r = Report::new("analyze", 7, &Tolerances::default());
        r.records.push(json!({"channel": "a", "eta": [0.5, 0.25], "fit": {"gap": 1e-17}}));
        r.records.push(json!({"channel": "b", "eta": [1.0], "xi_p": 0.30000000000000004}));
        r
    }

    #[test]
    fn csv_flattens_vectors_and_objects() {
        let csv = sample().to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "tool,version,command,seed,pass,channel,eta_1,eta_2,fit.gap,xi_p"
        );
        assert_eq!(lines.next().unwrap(), format!("gcap,{VERSION},analyze,7,true,a,0.5,0.25,1e-17,"));
        assert_eq!(
            lines.next().unwrap(),
            format!("gcap,{VERSION},analyze,7,true,b,1.0,,,0.30000000000000004")
        );
    }

    #[test]
    fn json_round_trips_full_precision() {
        let text = sample().to_json().unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["records"][1]["xi_p"].as_f64().unwrap(), 0.30000000000000004);
        assert_eq!(v["seed"], 7);
        assert!(v.get("wall_time_seconds").is_none());
    }
}
