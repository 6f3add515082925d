//! Report tables, CSV emission and the inverse parser.
//!
//! A report directory holds one CSV per table and `summary.txt`, whose header
//! block records provenance and a sha256 manifest of the CSVs. Numbers are
//! written with Rust's shortest round-trip formatting, so parsing an emitted
//! report gives back the same values bit for bit.

use std::fmt;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::HarnessError;

pub const SUMMARY_FILE: &str = "summary.txt";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Num(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }

    fn parse(field: &str) -> Self {
        if let Ok(i) = field.parse::<i64>() {
            Cell::Int(i)
        } else if let Ok(x) = field.parse::<f64>() {
            Cell::Num(x)
        } else {
            Cell::Text(field.to_string())
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(i) => write!(f, "{i}"),
            // Debug keeps a decimal point or exponent, so a float never reads back as an integer.
            Cell::Num(x) => write!(f, "{x:?}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.to_string(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width in table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Numeric values of `column` on rows where `key` equals `value`.
    pub fn select(&self, column: &str, key: &str, value: &Cell) -> Vec<f64> {
        let (Some(c), Some(k)) = (self.column(column), self.column(key)) else {
            return Vec::new();
        };
        self.rows
            .iter()
            .filter(|r| same(&r[k], value))
            .filter_map(|r| r[c].as_f64())
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string())).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8 csv")
    }

    pub fn from_csv(name: &str, text: &str) -> Result<Self, HarnessError> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let header = r
            .headers()
            .map_err(|e| HarnessError::Report(format!("{name}: {e}")))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| HarnessError::Report(format!("{name}: {e}")))?;
            rows.push(rec.iter().map(Cell::parse).collect());
        }
        Ok(Self { name: name.to_string(), header, rows })
    }
}

fn same(a: &Cell, b: &Cell) -> bool {
    match (a.as_f64(), b.as_f64()) {
        (Some(x), Some(y)) => x == y,
        _ => a == b,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub config_sha256: String,
    pub seed: u64,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub id: String,
    pub kind: String,
    pub tables: Vec<Table>,
    pub summary: Vec<String>,
    pub provenance: Provenance,
}

impl ExperimentReport {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write(path: &Path, text: &str) -> Result<(), HarnessError> {
    fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

/// Writes `<table>.csv` for every table and `summary.txt`. Creates `dir`.
pub fn emit_report(report: &ExperimentReport, dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut head = format!(
        "experiment = {}\nkind = {}\nseed = {}\nconfig_sha256 = {}\nversion = {}\n",
        report.id, report.kind, report.provenance.seed, report.provenance.config_sha256, report.provenance.version
    );
    for t in &report.tables {
        let csv = t.to_csv();
        write(&dir.join(format!("{}.csv", t.name)), &csv)?;
        head.push_str(&format!("table = {}.csv sha256:{}\n", t.name, sha256_hex(csv.as_bytes())));
    }
    head.push('\n');
    for line in &report.summary {
        head.push_str(line);
        head.push('\n');
    }
    write(&dir.join(SUMMARY_FILE), &head)
}

/// Reads a directory written by [`emit_report`], checking the CSV hashes.
pub fn parse_report(dir: &Path) -> Result<ExperimentReport, HarnessError> {
    let path = dir.join(SUMMARY_FILE);
    let text = fs::read_to_string(&path).map_err(|e| HarnessError::io(&path, e))?;
    let (head, body) = text
        .split_once("\n\n")
        .ok_or_else(|| HarnessError::Report(format!("{}: no blank line after the header", path.display())))?;
    let mut fields = std::collections::BTreeMap::new();
    let mut tables = Vec::new();
    for line in head.lines() {
        let (k, v) = line
            .split_once(" = ")
            .ok_or_else(|| HarnessError::Report(format!("bad header line {line:?}")))?;
        if k == "table" {
            let (file, hash) = v
                .split_once(" sha256:")
                .ok_or_else(|| HarnessError::Report(format!("bad manifest line {line:?}")))?;
            let p = dir.join(file);
            let csv = fs::read_to_string(&p).map_err(|e| HarnessError::io(&p, e))?;
            if sha256_hex(csv.as_bytes()) != hash {
                return Err(HarnessError::Report(format!("{file}: hash mismatch")));
            }
            tables.push(Table::from_csv(file.trim_end_matches(".csv"), &csv)?);
        } else {
            fields.insert(k.to_string(), v.to_string());
        }
    }
    let get = |k: &str| fields.get(k).cloned().ok_or_else(|| HarnessError::Report(format!("missing {k}")));
    Ok(ExperimentReport {
        id: get("experiment")?,
        kind: get("kind")?,
        tables,
        summary: body.lines().map(str::to_string).collect(),
        provenance: Provenance {
            config_sha256: get("config_sha256")?,
            seed: get("seed")?.parse().map_err(|_| HarnessError::Report("seed is not an integer".into()))?,
            version: get("version")?,
        },
    })
}
