use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// A command's result: the full document for JSON and flat rows for the
/// tabular formats.
pub struct Output {
    pub document: Value,
    pub rows: Vec<Map<String, Value>>,
}

impl Output {
    /// Tabular rows double as the JSON document.
    pub fn rows(rows: Vec<Map<String, Value>>) -> Self {
        Output { document: Value::Array(rows.iter().cloned().map(Value::Object).collect()), rows }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Union of row keys in first-seen order.
fn columns(rows: &[Map<String, Value>]) -> Vec<String> {
    let mut cols: Vec<String> = Vec::new();
    for row in rows {
        for key in row.keys() {
            if !cols.contains(key) {
                cols.push(key.clone());
            }
        }
    }
    cols
}

pub fn emit(out: &Output, format: Format) -> io::Result<()> {
    let stdout = io::stdout();
    let mut w = stdout.lock();
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &out.document)?;
            writeln!(w)?;
        }
        Format::Csv => {
            let cols = columns(&out.rows);
            let mut csv = csv::Writer::from_writer(w);
            csv.write_record(&cols)?;
            for row in &out.rows {
                csv.write_record(cols.iter().map(|c| row.get(c).map(cell).unwrap_or_default()))?;
            }
            csv.flush()?;
        }
        Format::Table => {
            let cols = columns(&out.rows);
            let cells: Vec<Vec<String>> = out
                .rows
                .iter()
                .map(|row| cols.iter().map(|c| row.get(c).map(cell).unwrap_or_default()).collect())
                .collect();
            let widths: Vec<usize> = cols
                .iter()
                .enumerate()
                .map(|(i, c)| cells.iter().map(|r| r[i].len()).chain([c.len()]).max().unwrap_or(0))
                .collect();
            let line = |fields: &[String]| {
                fields.iter().zip(&widths).map(|(f, &n)| format!("{f:<n$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
            };
            writeln!(w, "{}", line(&cols))?;
            for r in &cells {
                writeln!(w, "{}", line(r))?;
            }
        }
    }
    Ok(())
}
