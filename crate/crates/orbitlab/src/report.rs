//! Report assembly and JSON/CSV serialization.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::CliResult;

/// Bumped whenever the report layout changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Missing,
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Missing, Into::into)
    }
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Missing => Value::Null,
        }
    }

    /// Seventeen significant digits for floats; `.` as decimal separator.
    fn to_csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::Float(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }
}

/// Plot-ready rows plus a free-form summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub summary: Map<String, Value>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(command: &'static str, config: Value, columns: &[&'static str]) -> Self {
        Self {
            command,
            config,
            summary: Map::new(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) {
        self.summary.insert(
            key.to_string(),
            serde_json::to_value(value).unwrap_or(Value::Null),
        );
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config": self.config,
            "summary": self.summary,
            "table": {
                "columns": self.columns,
                "rows": self.rows.iter().map(|r| r.iter().map(Cell::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            },
        })
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> CliResult<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.to_json())
                    .map_err(std::io::Error::other)?;
                writeln!(out)?;
            }
            Format::Csv => {
                writeln!(
                    out,
                    "# orbitlab {} schema {SCHEMA_VERSION} command {}",
                    env!("CARGO_PKG_VERSION"),
                    self.command
                )?;
                writeln!(out, "# config {}", self.config)?;
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.columns)?;
                for r in &self.rows {
                    w.write_record(r.iter().map(Cell::to_csv))?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }
}
