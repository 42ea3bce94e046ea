//! Flat result rows shared by the command-line tool, as JSON lines or CSV.

use std::fmt;
use std::io::{self, Write};

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Outcome {
    Value(f64),
    Verdict(String),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Value(v) => write!(f, "{v}"),
            Outcome::Verdict(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    /// Value computed, or identity verified.
    Ok,
    /// Computed, but a check or hypothesis did not hold.
    Failed,
    /// Could not be computed (domain, convergence, ...).
    Error,
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowStatus::Ok => "ok",
            RowStatus::Failed => "failed",
            RowStatus::Error => "error",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub command: String,
    pub params_hash: String,
    /// Argument of the row: `z`, `t` or the moment order `k`.
    pub z: f64,
    pub value_or_verdict: Outcome,
    pub abs_err: Option<f64>,
    pub rel_err: Option<f64>,
    pub status: RowStatus,
    /// Free-form detail (error message, branch name, ...).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Row {
    pub fn value(command: &str, params_hash: &str, z: f64, value: f64) -> Self {
        Row {
            command: command.into(),
            params_hash: params_hash.into(),
            z,
            value_or_verdict: Outcome::Value(value),
            abs_err: None,
            rel_err: None,
            status: RowStatus::Ok,
            note: None,
        }
    }

    pub fn verdict(command: &str, params_hash: &str, z: f64, verdict: &str, ok: bool) -> Self {
        Row {
            command: command.into(),
            params_hash: params_hash.into(),
            z,
            value_or_verdict: Outcome::Verdict(verdict.into()),
            abs_err: None,
            rel_err: None,
            status: if ok { RowStatus::Ok } else { RowStatus::Failed },
            note: None,
        }
    }

    pub fn error(command: &str, params_hash: &str, z: f64, message: &str) -> Self {
        Row {
            command: command.into(),
            params_hash: params_hash.into(),
            z,
            value_or_verdict: Outcome::Verdict("error".into()),
            abs_err: None,
            rel_err: None,
            status: RowStatus::Error,
            note: Some(message.into()),
        }
    }

    pub fn with_errors(mut self, abs_err: f64, rel_err: f64) -> Self {
        self.abs_err = Some(abs_err);
        self.rel_err = Some(rel_err);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

pub const CSV_HEADER: &str = "command,params_hash,z,value_or_verdict,abs_err,rel_err,status,note";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Shortest round-trip form, with an exponent where that is shorter.
fn num(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| x.to_string())
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn csv_line(row: &Row) -> String {
    [
        csv_field(&row.command),
        csv_field(&row.params_hash),
        num(row.z),
        match &row.value_or_verdict {
            Outcome::Value(v) => num(*v),
            Outcome::Verdict(s) => csv_field(s),
        },
        opt(row.abs_err),
        opt(row.rel_err),
        row.status.to_string(),
        csv_field(row.note.as_deref().unwrap_or("")),
    ]
    .join(",")
}

pub fn write_rows<W: Write>(out: &mut W, rows: &[Row], format: Format) -> io::Result<()> {
    match format {
        Format::Json => {
            for row in rows {
                serde_json::to_writer(&mut *out, row)?;
                writeln!(out)?;
            }
        }
        Format::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for row in rows {
                writeln!(out, "{}", csv_line(row))?;
            }
        }
    }
    Ok(())
}
