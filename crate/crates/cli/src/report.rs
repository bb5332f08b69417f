use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "psde-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Rows for CSV output.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub subject: String,
    pub inputs: BTreeMap<String, String>,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub passed: bool,
    pub result: Value,
    #[serde(skip)]
    pub lines: Vec<String>,
    #[serde(skip)]
    pub table: Option<Table>,
}

impl Report {
    pub fn new(command: &str, subject: &str, seed: u64) -> Self {
        Report {
            schema: SCHEMA,
            command: command.to_string(),
            subject: subject.to_string(),
            inputs: BTreeMap::new(),
            seed,
            tolerances: BTreeMap::new(),
            passed: true,
            result: Value::Null,
            lines: Vec::new(),
            table: None,
        }
    }

    pub fn input(mut self, k: &str, v: impl ToString) -> Self {
        self.inputs.insert(k.to_string(), v.to_string());
        self
    }

    pub fn tolerance(mut self, k: &str, v: f64) -> Self {
        self.tolerances.insert(k.to_string(), v);
        self
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Json => {
                let s = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
                writeln!(out, "{s}")
            }
            Format::Csv => match &self.table {
                Some(t) => {
                    let mut w = csv::Writer::from_writer(out);
                    w.write_record(&t.headers).map_err(std::io::Error::other)?;
                    for r in &t.rows {
                        w.write_record(r).map_err(std::io::Error::other)?;
                    }
                    w.flush()
                }
                None => Err(std::io::Error::new(
                    std::io::ErrorKind::InvalidInput,
                    format!("`{}` has no tabular output", self.command),
                )),
            },
            Format::Text => {
                writeln!(out, "{}: {}", self.command, self.subject)?;
                for (k, v) in &self.inputs {
                    writeln!(out, "  {k} = {v}")?;
                }
                for l in &self.lines {
                    writeln!(out, "{l}")?;
                }
                writeln!(out, "{}", if self.passed { "PASS" } else { "FAIL" })
            }
        }
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}
