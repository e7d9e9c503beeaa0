use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Column-oriented plot data. Headers carry units as a suffix (`_hz`, `_s`, `_rad`).
#[derive(Debug)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Clone, Debug)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // shortest round-trip representation, so output is byte-stable
            Cell::Float(v) => format!("{v:?}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_columns(name: &str, columns: Vec<String>) -> Self {
        Self {
            name: name.to_string(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: serde_json::Map<String, Value> =
                    self.columns.iter().cloned().zip(r.iter().map(Cell::to_json)).collect();
                Value::Object(obj)
            })
            .collect();
        json!({ "columns": self.columns, "rows": rows })
    }
}

/// Everything one command produces.
pub struct Artifact {
    pub stem: &'static str,
    pub tables: Vec<Table>,
    /// Structured result written in JSON mode (tables are added under `tables`).
    pub result: Value,
    /// Headline numbers, echoed to stdout and stored in the sidecar.
    pub summary: Value,
    /// Additional JSON files written regardless of format, by file suffix.
    pub extra: Vec<(String, Value)>,
}

impl Artifact {
    pub fn new(stem: &'static str) -> Self {
        Self {
            stem,
            tables: Vec::new(),
            result: Value::Null,
            summary: json!({}),
            extra: Vec::new(),
        }
    }
}

fn write(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn pretty(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s.into_bytes()
}

fn csv_bytes(t: &Table) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Io(format!("csv: {e}"));
    w.write_record(&t.columns).map_err(fail)?;
    for r in &t.rows {
        w.write_record(r.iter().map(Cell::render)).map_err(fail)?;
    }
    w.into_inner().map_err(|e| CliError::Io(format!("csv: {e}")))
}

/// Direction of the interferometer map used for every output probability.
pub const CONVENTION: &str =
    "p(nu) = |<nu|W|psi>|^2, W the Fock-space lift of the forward mode unitary (last pulse leftmost)";

/// Writes the artifact files under `dir` and returns their paths.
///
/// CSV mode writes one file per table (`<stem>.csv` for the first, `<stem>.<name>.csv`
/// for the rest); JSON mode writes `<stem>.json`. A `<stem>.meta.json` sidecar with
/// the resolved configuration and version is written in both modes.
pub fn emit(art: &Artifact, dir: &Path, format: Format, config: Value) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();
    let put = |written: &mut Vec<PathBuf>, name: String, bytes: Vec<u8>| -> CliResult<()> {
        let path = dir.join(name);
        write(&path, &bytes)?;
        written.push(path);
        Ok(())
    };
    match format {
        Format::Csv => {
            for (i, t) in art.tables.iter().enumerate() {
                let name = if i == 0 {
                    format!("{}.csv", art.stem)
                } else {
                    format!("{}.{}.csv", art.stem, t.name)
                };
                put(&mut written, name, csv_bytes(t)?)?;
            }
        }
        Format::Json => {
            let tables: serde_json::Map<String, Value> =
                art.tables.iter().map(|t| (t.name.clone(), t.to_json())).collect();
            let doc = json!({ "result": art.result, "tables": tables });
            put(&mut written, format!("{}.json", art.stem), pretty(&doc))?;
        }
    }
    for (suffix, v) in &art.extra {
        put(&mut written, format!("{}.{suffix}", art.stem), pretty(v))?;
    }
    let files: Vec<String> = written
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    let meta = json!({
        "command": art.stem,
        "version": env!("CARGO_PKG_VERSION"),
        "convention": CONVENTION,
        "config": config,
        "summary": art.summary,
        "files": files,
    });
    put(&mut written, format!("{}.meta.json", art.stem), pretty(&meta))?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new("x", &["phi_rad", "p_10"]);
        assert_eq!(csv_bytes(&t).unwrap(), b"phi_rad,p_10\n");
    }

    #[test]
    fn floats_render_round_trip() {
        let mut t = Table::new("x", &["a", "b"]);
        t.push(vec![Cell::Float(0.1 + 0.2), Cell::Int(3)]);
        let text = String::from_utf8(csv_bytes(&t).unwrap()).unwrap();
        assert_eq!(text, "a,b\n0.30000000000000004,3\n");
    }
}
