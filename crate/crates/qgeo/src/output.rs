//! Artifact rendering: pretty JSON or a CSV table.
//!
//! CSV uses `,` separators, LF line endings and a mandatory header row.
//! Floats are written as `{:.16e}` so files round-trip bit-exactly.

use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use qgeo_core::{CMatrix, RMatrix};
use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(|s| s.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Single-row table from `(column, value)` pairs.
    pub fn record(fields: Vec<(&str, Cell)>) -> Self {
        let (header, row): (Vec<&str>, Vec<Cell>) = fields.into_iter().unzip();
        let mut t = Self::new(&header);
        t.push(row);
        t
    }
}

/// Result of one command.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub json: Value,
    pub table: Table,
    /// Numerical-quality warnings; `--strict` turns them into exit code 3.
    pub warnings: Vec<String>,
}

pub fn render(artifact: &Artifact, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(&artifact.json)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            w.write_record(&artifact.table.header)?;
            for row in &artifact.table.rows {
                w.write_record(row.iter().map(Cell::render))?;
            }
            w.into_inner().map_err(|e| CliError::Usage(e.to_string()))
        }
    }
}

pub fn write(bytes: &[u8], out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

pub fn matrix(m: &RMatrix) -> Vec<Vec<f64>> {
    // `+ 0.0` turns negative zeros into zeros
    (0..m.nrows()).map(|i| m.row(i).iter().map(|x| x + 0.0).collect()).collect()
}

/// Complex matrix as `{"re": [[..]], "im": [[..]]}`.
pub fn complex_matrix(m: &CMatrix) -> Value {
    let re = m.map(|z| z.re);
    let im = m.map(|z| z.im);
    serde_json::json!({ "re": matrix(&re), "im": matrix(&im) })
}

/// Long-form table of one or more same-shaped matrices: `row, col, a, b, ..`.
pub fn matrix_table(names: &[&str], ms: &[&RMatrix]) -> Table {
    let mut header = vec!["row", "col"];
    header.extend_from_slice(names);
    let mut t = Table::new(&header);
    let (r, c) = ms[0].shape();
    for i in 0..r {
        for j in 0..c {
            let mut row: Vec<Cell> = vec![i.into(), j.into()];
            row.extend(ms.iter().map(|m| Cell::Num(m[(i, j)])));
            t.push(row);
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_fixed_float_format() {
        let a = Artifact {
            json: Value::Null,
            table: Table::record(vec![("x", 0.1.into()), ("n", 3usize.into()), ("s", "a,b".into())]),
            warnings: vec![],
        };
        let text = String::from_utf8(render(&a, Format::Csv).unwrap()).unwrap();
        assert_eq!(text, "x,n,s\n1.0000000000000001e-1,3,\"a,b\"\n");
    }
}
