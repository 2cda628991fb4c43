//! Tabular exports shared by the command line tool and the plotting scripts.
//!
//! CSV: `# key: value` provenance lines, one header row, then rows of
//! comma-separated numbers with 17 significant digits. JSON: a single object
//! `{"meta": {...}, "columns": [...], "data": [[...], ...]}`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Domain(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExportTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Ordered (key, value) pairs describing how the table was produced.
    pub provenance: Vec<(String, String)>,
}

impl ExportTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            provenance: Vec::new(),
        }
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.push_meta(key, value);
        self
    }

    pub fn push_meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.provenance.push((key.into(), value.to_string()));
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.provenance
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Domain(format!(
                "row has {} values, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.provenance {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(',');
                }
                first = false;
                let _ = write!(out, "{v:.16e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut meta = Map::new();
        for (k, v) in &self.provenance {
            meta.insert(k.clone(), Value::String(v.clone()));
        }
        let doc = serde_json::json!({
            "meta": meta,
            "columns": self.columns,
            "data": self.rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("finite table serialises");
        s.push('\n');
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut provenance = Vec::new();
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = loop {
            let line = lines
                .next()
                .ok_or_else(|| Error::Domain("missing header row".into()))?;
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.trim().split_once(':') {
                    provenance.push((k.trim().to_string(), v.trim().to_string()));
                }
            } else {
                break line;
            }
        };
        let mut table = ExportTable::new(header.split(',').map(str::trim));
        table.provenance = provenance;
        for (n, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Domain(format!("row {}: bad number `{v}`", n + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            table.push_row(row)?;
        }
        Ok(table)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value =
            serde_json::from_str(text).map_err(|e| Error::Domain(format!("json: {e}")))?;
        let columns: Vec<String> = serde_json::from_value(v["columns"].clone())
            .map_err(|e| Error::Domain(format!("json columns: {e}")))?;
        let data: Vec<Vec<f64>> = serde_json::from_value(v["data"].clone())
            .map_err(|e| Error::Domain(format!("json data: {e}")))?;
        let mut table = ExportTable::new(columns);
        if let Some(meta) = v["meta"].as_object() {
            for (k, val) in meta {
                table.push_meta(k.clone(), val.as_str().unwrap_or_default());
            }
        }
        for row in data {
            table.push_row(row)?;
        }
        Ok(table)
    }
}
