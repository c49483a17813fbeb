//! Record rendering: aligned text, comma-separated, or JSON. One record is
//! an ordered list of (field, value) pairs; every number is already a
//! decimal string so output is deterministic and round-trips.

use crate::config::OutputFormat;
use serde_json::{Map, Value};

#[derive(Clone, Debug, Default)]
pub struct Record {
    fields: Vec<(String, String)>,
}

impl Record {
    pub fn new() -> Self {
        Record { fields: Vec::new() }
    }

    pub fn push(&mut self, key: &str, value: impl Into<String>) {
        self.fields.push((key.to_string(), value.into()));
    }

    pub fn fields(&self) -> &[(String, String)] {
        &self.fields
    }
}

pub fn render(records: &[Record], format: &OutputFormat) -> String {
    match format {
        OutputFormat::Text => render_text(records),
        OutputFormat::Csv => render_csv(records),
        OutputFormat::Json => render_json(records),
    }
}

/// Tabular rendering with an explicit schema: the header prints even when
/// there are no data rows.
pub fn render_table(schema: &[&str], records: &[Record], format: &OutputFormat) -> String {
    match format {
        OutputFormat::Text => {
            let mut widths: Vec<usize> = schema.iter().map(|h| h.len()).collect();
            for r in records {
                for (i, (_, v)) in r.fields().iter().enumerate() {
                    widths[i] = widths[i].max(v.len());
                }
            }
            let mut out = String::new();
            for (i, h) in schema.iter().enumerate() {
                if i > 0 {
                    out.push_str("  ");
                }
                out.push_str(&format!("{:<width$}", h, width = widths[i]));
            }
            out.push('\n');
            for r in records {
                for (i, (_, v)) in r.fields().iter().enumerate() {
                    if i > 0 {
                        out.push_str("  ");
                    }
                    out.push_str(&format!("{:<width$}", v, width = widths[i]));
                }
                out.push('\n');
            }
            out
        }
        OutputFormat::Csv => {
            let mut out = String::new();
            out.push_str(&schema.join(","));
            out.push('\n');
            for r in records {
                let row: Vec<&str> = r.fields().iter().map(|(_, v)| v.as_str()).collect();
                out.push_str(&row.join(","));
                out.push('\n');
            }
            out
        }
        OutputFormat::Json => render_json(records),
    }
}

fn render_text(records: &[Record]) -> String {
    let mut out = String::new();
    if records.is_empty() {
        return out;
    }
    // column-aligned: one row per record when all records share a schema
    let headers: Vec<&str> = records[0].fields().iter().map(|(k, _)| k.as_str()).collect();
    let uniform = records
        .iter()
        .all(|r| r.fields().iter().map(|(k, _)| k.as_str()).collect::<Vec<_>>() == headers);
    if uniform && records.len() > 1 {
        let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
        for r in records {
            for (i, (_, v)) in r.fields().iter().enumerate() {
                widths[i] = widths[i].max(v.len());
            }
        }
        for (i, h) in headers.iter().enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            out.push_str(&format!("{:<width$}", h, width = widths[i]));
        }
        out.push('\n');
        for r in records {
            for (i, (_, v)) in r.fields().iter().enumerate() {
                if i > 0 {
                    out.push_str("  ");
                }
                out.push_str(&format!("{:<width$}", v, width = widths[i]));
            }
            out.push('\n');
        }
    } else {
        for (n, r) in records.iter().enumerate() {
            if n > 0 {
                out.push('\n');
            }
            let w = r.fields().iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, v) in r.fields() {
                out.push_str(&format!("{:<width$}  {}\n", k, v, width = w));
            }
        }
    }
    out
}

fn render_csv(records: &[Record]) -> String {
    let mut out = String::new();
    if records.is_empty() {
        return out;
    }
    let headers: Vec<&str> = records[0].fields().iter().map(|(k, _)| k.as_str()).collect();
    out.push_str(&headers.join(","));
    out.push('\n');
    for r in records {
        let row: Vec<&str> = r.fields().iter().map(|(_, v)| v.as_str()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn render_json(records: &[Record]) -> String {
    let arr: Vec<Value> = records
        .iter()
        .map(|r| {
            let mut m = Map::new();
            for (k, v) in r.fields() {
                m.insert(k.clone(), Value::String(v.clone()));
            }
            Value::Object(m)
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&Value::Array(arr)).unwrap();
    s.push('\n');
    s
}
