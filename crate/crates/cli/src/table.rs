use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    // Int first so integers read back as Int
    Int(i64),
    Num(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) if x.is_nan() => "nan".into(),
            // no "-0" in the artifact
            Cell::Num(x) => format!("{:.11e}", x + 0.0),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

/// Rows plus the provenance every artifact carries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Table {
    pub command: String,
    pub config_sha256: String,
    pub units: String,
    /// Extra header lines, ordered by key.
    pub meta: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &str, config_sha256: &str, units: &str, columns: &[&str]) -> Self {
        Table {
            command: command.to_string(),
            config_sha256: config_sha256.to_string(),
            units: units.to_string(),
            meta: BTreeMap::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.meta.insert(key.to_string(), value.to_string());
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> CliResult<Vec<u8>> {
        let mut buf = Vec::new();
        buf.extend_from_slice(format!("# command: {}\n", self.command).as_bytes());
        buf.extend_from_slice(format!("# config_sha256: {}\n", self.config_sha256).as_bytes());
        buf.extend_from_slice(format!("# units: {}\n", self.units).as_bytes());
        for (k, v) in &self.meta {
            buf.extend_from_slice(format!("# {k}: {v}\n").as_bytes());
        }
        let mut w = csv::Writer::from_writer(buf);
        let err = |e: csv::Error| CliError::Config(format!("csv: {e}"));
        w.write_record(&self.columns).map_err(err)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::csv)).map_err(err)?;
        }
        w.into_inner().map_err(|e| CliError::Config(format!("csv: {e}")))
    }

    pub fn to_json(&self) -> CliResult<Vec<u8>> {
        let mut v = serde_json::to_vec_pretty(self).map_err(|e| CliError::Config(format!("json: {e}")))?;
        v.push(b'\n');
        Ok(v)
    }
}
