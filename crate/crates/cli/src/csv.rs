//! Fixed-schema CSV emission.
//!
//! Floats are written in their shortest round-trip form: plain decimal for
//! magnitudes in [1e-5, 1e16), `e` notation otherwise (`7.2158e-21`). NaN is
//! written as `nan`, infinities as `inf`/`-inf`. Lines end in `\n`; output
//! never depends on locale.

use std::path::{Path, PathBuf};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(&'static str),
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

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&'static str> for Cell {
    fn from(v: &'static str) -> Self {
        Cell::Text(v)
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else if x == 0.0 {
        "0".to_string()
    } else if (1e-5..1e16).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Dataset {
    pub fn new(columns: &[&'static str]) -> Self {
        Dataset {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the schema");
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut w = ::csv::WriterBuilder::new()
            .terminator(::csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|cell| match cell {
                Cell::Float(v) => format_float(*v),
                Cell::Int(v) => v.to_string(),
                Cell::Text(s) => s.to_string(),
            }))
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }
}

pub fn emit_csv(dataset: &Dataset, path: &Path) -> Result<PathBuf, CliError> {
    if dataset.rows.is_empty() {
        return Err(CliError::Config(format!(
            "refusing to write empty dataset to {}",
            path.display()
        )));
    }
    std::fs::write(path, dataset.render()).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(path.to_path_buf())
}
