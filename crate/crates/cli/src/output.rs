//! Content-addressed run directories, manifests and CSV tables.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const MANIFEST_SCHEMA: &str = "lrmon-manifest/1";

/// A CSV table held in memory until the run is committed.
pub struct Table {
    pub name: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

pub enum Cell {
    F(f64),
    I(i64),
    U(usize),
    S(String),
    B(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::U(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::I(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::B(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::S(v)
    }
}

/// 17 significant digits, so values round-trip exactly.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(v) => fmt_f64(*v),
            Cell::I(v) => v.to_string(),
            Cell::U(v) => v.to_string(),
            Cell::S(s) => s.clone(),
            Cell::B(b) => b.to_string(),
        }
    }
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table { name: name.to_string(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width mismatch in {}", self.name);
        self.rows.push(row.iter().map(Cell::render).collect());
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    fn to_bytes(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of the command name, its parameters and the library version.
pub fn run_hash<P: Serialize>(command: &str, params: &P) -> Result<String, CliError> {
    let key = json!({ "command": command, "params": params, "version": env!("CARGO_PKG_VERSION") });
    Ok(sha256_hex(serde_json::to_string(&key)?.as_bytes()))
}

pub struct Run {
    pub command: String,
    pub params: Value,
    pub tables: Vec<Table>,
    pub summary: Value,
    pub notes: Vec<String>,
}

impl Run {
    pub fn new<P: Serialize>(command: &str, params: &P) -> Result<Self, CliError> {
        Ok(Run { command: command.into(), params: serde_json::to_value(params)?, tables: Vec::new(), summary: json!({}), notes: Vec::new() })
    }

    /// Writes `<root>/<command>-<hash8>/` with the tables and manifest.json.
    pub fn commit(self, root: &Path) -> Result<PathBuf, CliError> {
        let hash = run_hash(&self.command, &self.params)?;
        let dir = root.join(format!("{}-{}", self.command, &hash[..8]));
        fs::create_dir_all(&dir)?;
        let mut files = Vec::new();
        for t in &self.tables {
            let name = format!("{}.csv", t.name);
            let bytes = t.to_bytes()?;
            files.push(json!({ "name": name, "sha256": sha256_hex(&bytes), "rows": t.len() }));
            fs::write(dir.join(&name), bytes)?;
        }
        let manifest = json!({
            "schema": MANIFEST_SCHEMA,
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "hash": hash,
            "params": self.params,
            "files": files,
            "summary": self.summary,
            "notes": self.notes,
        });
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(dir.join("manifest.json"), text)?;
        Ok(dir)
    }
}
