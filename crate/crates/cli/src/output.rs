//! Self-describing CSV and JSON artifacts.

use std::fmt::Display;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Header data shared by both formats.
pub struct Header {
    pub command: &'static str,
    pub config: Map<String, Value>,
}

impl Header {
    pub fn new(command: &'static str, args: &impl Serialize, format: Format) -> Self {
        let mut config = match serde_json::to_value(args).expect("flags serialize") {
            Value::Object(map) => map,
            other => Map::from_iter([("args".to_string(), other)]),
        };
        config.insert(
            "format".into(),
            serde_json::to_value(format).expect("format serializes"),
        );
        Header { command, config }
    }
}

/// A CSV table: column names and pre-formatted cells.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub fn cell(v: impl Display) -> String {
    v.to_string()
}

pub fn opt_cell<T: Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn version_line() -> String {
    format!("{} {}", env!("CARGO_BIN_NAME"), env!("CARGO_PKG_VERSION"))
}

pub fn render_csv(header: &Header, table: &Table) -> String {
    let mut out = String::new();
    out.push_str(&format!("# {}\n", version_line()));
    out.push_str(&format!("# command: {}\n", header.command));
    for (k, v) in &header.config {
        let v = match v {
            Value::String(s) => s.clone(),
            Value::Null => String::new(),
            other => other.to_string(),
        };
        out.push_str(&format!("# {k}={v}\n"));
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn render_json(header: &Header, result: Value) -> String {
    let doc = json!({
        "tool": env!("CARGO_BIN_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": header.command,
        "config": header.config,
        "result": result,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json renders");
    s.push('\n');
    s
}

pub fn emit(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            lock.flush()
        }
    }
}
