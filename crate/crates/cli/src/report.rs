use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

pub type Record = Map<String, Value>;

/// One document per invocation.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub summary: Record,
    pub records: Vec<Record>,
}

impl Report {
    pub fn new(command: String) -> Self {
        Report {
            command,
            summary: Record::new(),
            records: Vec::new(),
        }
    }

    pub fn summary(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    pub fn push(&mut self, record: Record) {
        self.records.push(record);
    }

    pub fn write(&self, format: Format, out: &mut impl Write) -> io::Result<()> {
        match format {
            Format::Json => {
                let mut doc = Record::new();
                doc.insert("command".into(), self.command.clone().into());
                doc.insert("version".into(), env!("CARGO_PKG_VERSION").into());
                if !self.summary.is_empty() {
                    doc.insert("summary".into(), Value::Object(self.summary.clone()));
                }
                doc.insert(
                    "records".into(),
                    Value::Array(self.records.iter().cloned().map(Value::Object).collect()),
                );
                serde_json::to_writer_pretty(&mut *out, &Value::Object(doc))?;
                writeln!(out)
            }
            Format::Csv => {
                // records only; the summary has no place in a flat table
                let columns = columns(&self.records);
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&columns)?;
                for r in &self.records {
                    w.write_record(columns.iter().map(|c| cell(r.get(c))))?;
                }
                w.flush()
            }
            Format::Text => {
                writeln!(out, "# {}", self.command)?;
                writeln!(out, "# version {}", env!("CARGO_PKG_VERSION"))?;
                for (k, v) in &self.summary {
                    writeln!(out, "{k}: {}", cell(Some(v)))?;
                }
                if !self.records.is_empty() {
                    let columns = columns(&self.records);
                    let rows: Vec<Vec<String>> = self
                        .records
                        .iter()
                        .map(|r| columns.iter().map(|c| cell(r.get(c))).collect())
                        .collect();
                    let widths: Vec<usize> = columns
                        .iter()
                        .enumerate()
                        .map(|(i, c)| {
                            rows.iter()
                                .map(|r| r[i].chars().count())
                                .chain([c.len()])
                                .max()
                                .unwrap_or(0)
                        })
                        .collect();
                    let line = |cells: Vec<&str>| {
                        cells
                            .iter()
                            .zip(&widths)
                            .map(|(s, w)| format!("{s:<w$}"))
                            .collect::<Vec<_>>()
                            .join("  ")
                            .trim_end()
                            .to_string()
                    };
                    writeln!(
                        out,
                        "{}",
                        line(columns.iter().map(String::as_str).collect())
                    )?;
                    for r in &rows {
                        writeln!(out, "{}", line(r.iter().map(String::as_str).collect()))?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Keys in first-seen order across all records.
fn columns(records: &[Record]) -> Vec<String> {
    let mut cols: Vec<String> = Vec::new();
    for r in records {
        for k in r.keys() {
            if !cols.contains(k) {
                cols.push(k.clone());
            }
        }
    }
    cols
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

/// Builds a record from `key => value` pairs.
#[macro_export]
macro_rules! record {
    ($($k:expr => $v:expr),* $(,)?) => {{
        let mut r = $crate::report::Record::new();
        $( r.insert($k.to_string(), serde_json::json!($v)); )*
        r
    }};
}
