use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::num::format_real;

/// A CSV table held in memory until it is written.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    /// File name relative to the output directory.
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Table {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width of {}", self.name);
        self.rows.push(row);
    }

    /// Comma-separated, LF-terminated, header first.
    pub fn to_csv(&self) -> Result<String> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::internal(format!("csv encoding of {}: {e}", self.name));
        writer.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            writer.write_record(row).map_err(csv_err)?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| Error::internal(format!("csv encoding of {}: {e}", self.name)))?;
        String::from_utf8(bytes).map_err(|e| Error::internal(e.to_string()))
    }

    /// Reads a table written by [`Table::to_csv`].
    pub fn from_csv(name: impl Into<String>, text: &str) -> Result<Self> {
        let name = name.into();
        let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let csv_err = |e: csv::Error| Error::config(format!("{name}: {e}"));
        let header = reader.headers().map_err(csv_err)?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            rows.push(record.map_err(csv_err)?.iter().map(String::from).collect());
        }
        Ok(Table { name, header, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Formats a float for CSV output with 17 significant digits.
pub fn real(x: f64) -> String {
    format_real(x)
}

/// Tables and JSON documents produced by one experiment.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub tables: Vec<Table>,
    /// `(relative path, content)` pairs.
    pub documents: Vec<(String, String)>,
}

impl Outcome {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn document(&self, name: &str) -> Option<&str> {
        self.documents.iter().find(|d| d.0 == name).map(|d| d.1.as_str())
    }

    /// Every output file as `(relative path, bytes)`, in emission order.
    pub fn files(&self) -> Result<Vec<(String, String)>> {
        let mut out = Vec::with_capacity(self.tables.len() + self.documents.len());
        for t in &self.tables {
            out.push((t.name.clone(), t.to_csv()?));
        }
        out.extend(self.documents.iter().cloned());
        Ok(out)
    }

    /// Writes every file below `dir`, creating directories as needed.
    pub fn emit(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        for (name, content) in self.files()? {
            let path = dir.join(&name);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            std::fs::write(&path, content).map_err(|e| Error::io(&path, e))?;
            log::info!("wrote {}", path.display());
            written.push(path);
        }
        Ok(written)
    }
}
