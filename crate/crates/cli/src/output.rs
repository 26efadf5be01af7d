//! CSV tables: UTF-8, LF line endings, RFC 4180 quoting.

use std::path::{Path, PathBuf};

use crate::error::CliError;

/// A header row and its data rows, every cell already formatted.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write(&self, path: &Path) -> Result<PathBuf, CliError> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(path)?;
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush().map_err(|e| CliError::io(path, e))?;
        Ok(path.to_path_buf())
    }
}

/// Shortest round-trip decimal, switching to exponent notation for very
/// small or very large magnitudes.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x != 0.0 && a.is_finite() && !(1e-4..1e9).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// One row of the failure manifest written next to partial results.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub target: String,
    pub curve: String,
    pub x: f64,
    pub error: String,
}

pub fn write_manifest(failures: &[Failure], path: &Path) -> Result<PathBuf, CliError> {
    let mut t = Table::new(&["target", "curve", "x", "error"]);
    for f in failures {
        t.push(vec![f.target.clone(), f.curve.clone(), num(f.x), f.error.clone()]);
    }
    t.write(path)
}
