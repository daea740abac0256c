use std::io::{self, Write};

use serde::Serialize;
use serde_json::{json, Value};

use crate::args::Format;

/// Rows for the csv and table formats.
#[derive(Debug, Default)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&'static str]) -> Self {
        Table {
            headers: headers.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()
    }

    pub fn write_aligned<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |out: &mut W, cells: &mut dyn Iterator<Item = &str>| -> io::Result<()> {
            let mut s = String::new();
            for (i, (c, w)) in cells.zip(&widths).enumerate() {
                if i > 0 {
                    s.push_str("  ");
                }
                s.push_str(c);
                s.extend(std::iter::repeat_n(' ', w - c.chars().count()));
            }
            writeln!(out, "{}", s.trim_end())
        };
        line(&mut out, &mut self.headers.iter().copied())?;
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        line(&mut out, &mut rule.iter().map(String::as_str))?;
        for row in &self.rows {
            line(&mut out, &mut row.iter().map(String::as_str))?;
        }
        Ok(())
    }
}

/// What a subcommand hands back for printing.
#[derive(Debug)]
pub struct Outcome {
    pub parameters: Value,
    pub result: Value,
    /// Arithmetic mode and tail bounds behind the floating values in `result`.
    pub provenance: Value,
    pub table: Table,
    /// Printed verbatim in place of the record.
    pub raw: Option<String>,
    /// Some reported property does not hold.
    pub failed: bool,
}

#[derive(Serialize)]
struct OutputRecord<'a> {
    command: &'a str,
    parameters: &'a Value,
    result: &'a Value,
    provenance: &'a Value,
    wall_time_ms: f64,
}

pub fn emit<W: Write>(
    mut out: W,
    format: Format,
    command: &str,
    outcome: &Outcome,
    wall_time_ms: f64,
) -> io::Result<()> {
    if let Some(raw) = &outcome.raw {
        return out.write_all(raw.as_bytes());
    }
    match format {
        Format::Json => {
            let record = OutputRecord {
                command,
                parameters: &outcome.parameters,
                result: &outcome.result,
                provenance: &outcome.provenance,
                wall_time_ms: (wall_time_ms * 1000.0).round() / 1000.0,
            };
            serde_json::to_writer(&mut out, &record)?;
            writeln!(out)
        }
        Format::Csv => outcome.table.write_csv(out),
        Format::Table => outcome.table.write_aligned(out),
    }
}

pub fn error_json(kind: &str, message: &str) -> String {
    json!({ "error": { "kind": kind, "message": message } }).to_string()
}

/// Shortest round-trip decimal, switching to exponent form far from 1.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}
