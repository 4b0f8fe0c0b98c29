//! CSV tables with 17-significant-digit floats and JSON sidecars.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;

pub const LIBRARY: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `x` with 17 significant digits, which round-trips every `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Float(x) => fmt_f64(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn floats(&self, name: &str) -> Vec<f64> {
        let Some(j) = self.column(name) else { return Vec::new() };
        self.rows
            .iter()
            .filter_map(|r| match &r[j] {
                Cell::Float(x) => Some(*x),
                Cell::Int(n) => Some(*n as f64),
                _ => None,
            })
            .collect()
    }
}

/// Provenance written next to a CSV file.
#[derive(Clone, Debug, Serialize)]
pub struct Sidecar<C: Serialize> {
    pub library: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: C,
    /// `"ok"` or `"failed"`; failed runs keep the rows computed so far.
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub summary: serde_json::Value,
}

impl<C: Serialize> Sidecar<C> {
    pub fn new(command: &str, config: C) -> Self {
        Sidecar {
            library: LIBRARY,
            version: VERSION,
            command: command.to_string(),
            config,
            status: "ok",
            error: None,
            summary: serde_json::Value::Null,
        }
    }

    pub fn failed(mut self, error: impl ToString) -> Self {
        self.status = "failed";
        self.error = Some(error.to_string());
        self
    }
}

/// `out.csv` → `out.csv.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

pub fn write_outputs<C: Serialize>(csv: &Path, table: &Table, sidecar: &Sidecar<C>) -> Result<PathBuf> {
    if let Some(dir) = csv.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    table.write_csv(std::fs::File::create(csv)?)?;
    let side = sidecar_path(csv);
    std::fs::write(&side, serde_json::to_string_pretty(sidecar)? + "\n")?;
    Ok(side)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::PI, 1e-300, -2.5e17, 0.31611423453550047] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(f64::NAN), "NaN");
    }

    #[test]
    fn table_layout() {
        let mut t = Table::new(&["sigma", "pressure", "note"]);
        t.push(vec![0.5.into(), Cell::Float(-0.25), "a,b".into()]);
        t.push(vec![1usize.into(), true.into(), "x".into()]);
        assert_eq!(
            t.to_csv_string(),
            "sigma,pressure,note\n5.0000000000000000e-1,-2.5000000000000000e-1,\"a,b\"\n1,true,x\n"
        );
        assert_eq!(t.floats("sigma"), vec![0.5, 1.0]);
    }

    #[test]
    fn sidecar_next_to_csv() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("sub/out.csv");
        let t = Table::new(&["a"]);
        let side = write_outputs(&csv, &t, &Sidecar::new("test", serde_json::json!({"k": 1})).failed("boom")).unwrap();
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(side).unwrap()).unwrap();
        assert_eq!(v["status"], "failed");
        assert_eq!(v["version"], VERSION);
        assert_eq!(std::fs::read_to_string(csv).unwrap(), "a\n");
    }
}
