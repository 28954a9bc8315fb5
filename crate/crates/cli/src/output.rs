//! Rendering of reports. Every output starts with the artifact version and
//! the resolved configuration.

use crate::config::{Format, RunConfig};
use anyhow::Context;
use serde_json::{json, Value};

pub const ARTIFACT: &str = "wph";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A flat numeric table for CSV output.
pub struct Table {
    pub header: Vec<String>,
    pub text_rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str], rows: Vec<Vec<f64>>) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            text_rows: rows.into_iter().map(|r| r.into_iter().map(num).collect()).collect(),
        }
    }
}

/// Shortest round-trip decimal form.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub struct Emitted {
    pub report: Value,
    pub table: Table,
    /// Fitted or limit values printed in the CSV header block.
    pub notes: Vec<(String, String)>,
    /// Failed invariants; nonempty means exit code 1.
    pub failures: Vec<String>,
}

pub fn render(command: &str, cfg: &RunConfig, out: &Emitted, format: Format) -> anyhow::Result<String> {
    let config = serde_json::to_value(cfg).context("serializing config")?;
    match format {
        Format::Json => {
            let doc = json!({
                "meta": {"artifact": ARTIFACT, "version": VERSION, "command": command, "config": config},
                "report": out.report,
            });
            Ok(serde_json::to_string_pretty(&doc)? + "\n")
        }
        Format::Csv => render_csv(command, &config, out),
    }
}

/// Header lines are records whose first field starts with '#', so the file
/// stays valid CSV and readers with a comment character skip them.
fn render_csv(command: &str, config: &Value, out: &Emitted) -> anyhow::Result<String> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    w.write_record([format!("# {ARTIFACT} {VERSION}"), command.to_string()])?;
    if let Value::Object(map) = config {
        for (k, v) in map {
            let text = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            w.write_record([format!("# config.{k}"), text])?;
        }
    }
    for (k, v) in &out.notes {
        w.write_record([format!("# {k}"), v.clone()])?;
    }
    w.write_record(&out.table.header)?;
    for row in &out.table.text_rows {
        w.write_record(row)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?)?)
}
