//! Number formatting and output sinks.
//!
//! Numbers use the shortest decimal string that parses back to the same
//! `f64`. Magnitudes in `[1e-5, 1e16)` (and zero) are written positionally,
//! everything else in exponent form (`1.5e-7`). Non-finite values print as
//! `NaN`, `inf` and `-inf`.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{json, Value};

use crate::config::Format;
use crate::error::CliResult;

pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| fmt_num(x)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        json!({ "columns": self.header, "rows": self.rows })
    }
}

/// What a command produces: an optional table plus a JSON summary. A report
/// carrying `violation` is still written out, then the run exits with the
/// invariant-violation code.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub table: Option<Table>,
    pub summary: Value,
    pub violation: Option<String>,
}

impl Report {
    pub fn new(table: Option<Table>, summary: Value) -> Self {
        Self { table, summary, violation: None }
    }
}

fn write_to(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

/// CSV: table to `out` (stdout by default), summary to `summary_path` or
/// stderr. JSON: one document `{columns, rows, summary}` to `out`. A report
/// without a table always writes its summary to `out`.
pub fn emit(report: &Report, format: Format, out: Option<&Path>, summary_path: Option<&Path>) -> CliResult<()> {
    match (&report.table, format) {
        (None, _) => write_to(out, &to_pretty(&report.summary)),
        (Some(table), Format::Json) => {
            let mut doc = table.to_json();
            doc["summary"] = report.summary.clone();
            write_to(out, &to_pretty(&doc))
        }
        (Some(table), Format::Csv) => {
            write_to(out, &table.to_csv())?;
            match summary_path {
                Some(p) => fs::write(p, to_pretty(&report.summary))?,
                None => eprintln!("{}", serde_json::to_string(&report.summary).expect("JSON values serialize")),
            }
            Ok(())
        }
    }
}
