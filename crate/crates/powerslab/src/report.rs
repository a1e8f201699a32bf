//! Deterministic result tables and their JSON / CSV / markdown forms.
//!
//! Serialization is bit-stable: identical tables yield identical bytes in
//! every format. The JSON form carries a `meta` object (tool version,
//! wall-clock `runtime_ms`, echoed configuration defaults); `runtime_ms`
//! is the only field exempt from the determinism contract.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Int,
    Real,
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

/// A single table cell. Variant order matters for JSON round-trips:
/// untagged deserialization tries `Int` before `Real`, so `3` comes back
/// as an integer and `3.0` as a real.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl Cell {
    fn kind(&self) -> ColumnKind {
        match self {
            Cell::Int(_) => ColumnKind::Int,
            Cell::Real(_) => ColumnKind::Real,
            Cell::Text(_) => ColumnKind::Text,
        }
    }

    /// Fixed-width rendering for CSV and markdown: reals get 5 decimals.
    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format!("{v:.5}"),
            Cell::Text(v) => v.clone(),
        }
    }
}

/// Where a row's numbers come from: a published value reproduced by the
/// computation, a value derived here, or a non-rigorous illustration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    PaperReproduction,
    Derived,
    Heuristic,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::PaperReproduction => "paper-reproduction",
            Provenance::Derived => "derived",
            Provenance::Heuristic => "heuristic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportTable {
    pub title: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    /// One label per row, parallel to `rows`.
    pub provenance: Vec<Provenance>,
}

impl ReportTable {
    pub fn new(title: impl Into<String>, columns: &[(&str, ColumnKind)]) -> Self {
        ReportTable {
            title: title.into(),
            columns: columns
                .iter()
                .map(|&(name, kind)| Column {
                    name: name.to_string(),
                    kind,
                })
                .collect(),
            rows: Vec::new(),
            provenance: Vec::new(),
        }
    }

    /// Append a row; panics on arity or kind mismatch (programmer error).
    pub fn push_row(&mut self, cells: Vec<Cell>, provenance: Provenance) {
        assert_eq!(
            cells.len(),
            self.columns.len(),
            "row arity {} != column arity {}",
            cells.len(),
            self.columns.len()
        );
        for (cell, col) in cells.iter().zip(&self.columns) {
            assert_eq!(
                cell.kind(),
                col.kind,
                "cell kind mismatch in column '{}'",
                col.name
            );
        }
        self.rows.push(cells);
        self.provenance.push(provenance);
    }
}

/// Output metadata attached to JSON documents.
#[derive(Debug, Clone)]
pub struct Meta {
    pub version: String,
    pub runtime_ms: u128,
    /// Echoed configuration defaults, sorted by key for stable output.
    pub extra: BTreeMap<String, serde_json::Value>,
}

impl Meta {
    pub fn new(runtime_ms: u128) -> Self {
        Meta {
            version: env!("CARGO_PKG_VERSION").to_string(),
            runtime_ms,
            extra: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.extra.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Md,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "md" => Ok(Format::Md),
            other => Err(Error::invalid(format!(
                "unknown format '{other}' (expected json, csv, or md)"
            ))),
        }
    }
}

/// Render a table in the requested format.
pub fn serialize(table: &ReportTable, format: Format, meta: &Meta) -> Result<String> {
    match format {
        Format::Json => to_json(table, meta),
        Format::Csv => to_csv(table),
        Format::Md => Ok(to_markdown(table)),
    }
}

fn to_json(table: &ReportTable, meta: &Meta) -> Result<String> {
    let mut value = serde_json::to_value(table).map_err(|e| Error::Serialize(e.to_string()))?;
    let mut meta_obj = serde_json::Map::new();
    meta_obj.insert("version".into(), meta.version.clone().into());
    meta_obj.insert("runtime_ms".into(), (meta.runtime_ms as u64).into());
    for (k, v) in &meta.extra {
        meta_obj.insert(k.clone(), v.clone());
    }
    value
        .as_object_mut()
        .expect("table serializes to an object")
        .insert("meta".into(), meta_obj.into());
    serde_json::to_string_pretty(&value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::Serialize(e.to_string()))
}

/// Parse the JSON form back into a table (the `meta` key is ignored).
pub fn from_json(text: &str) -> Result<ReportTable> {
    serde_json::from_str(text).map_err(|e| Error::Serialize(e.to_string()))
}

fn to_csv(table: &ReportTable) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let header: Vec<&str> = table
        .columns
        .iter()
        .map(|c| c.name.as_str())
        .chain(std::iter::once("provenance"))
        .collect();
    let io_err = |e: csv::Error| Error::Serialize(e.to_string());
    writer.write_record(&header).map_err(io_err)?;
    for (row, prov) in table.rows.iter().zip(&table.provenance) {
        let record: Vec<String> = row
            .iter()
            .map(Cell::render)
            .chain(std::iter::once(prov.as_str().to_string()))
            .collect();
        writer.write_record(&record).map_err(io_err)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialize(e.to_string()))
}

fn md_escape(s: &str) -> String {
    s.replace('|', "\\|")
}

fn to_markdown(table: &ReportTable) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "### {}", md_escape(&table.title));
    out.push('\n');
    let names: Vec<String> = table
        .columns
        .iter()
        .map(|c| md_escape(&c.name))
        .chain(std::iter::once("provenance".to_string()))
        .collect();
    let _ = writeln!(out, "| {} |", names.join(" | "));
    let _ = writeln!(out, "|{}|", names.iter().map(|_| " --- ").collect::<Vec<_>>().join("|"));
    for (row, prov) in table.rows.iter().zip(&table.provenance) {
        let cells: Vec<String> = row
            .iter()
            .map(|c| md_escape(&c.render()))
            .chain(std::iter::once(prov.as_str().to_string()))
            .collect();
        let _ = writeln!(out, "| {} |", cells.join(" | "));
    }
    out
}
