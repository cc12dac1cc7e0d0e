//! CSV tables with 17 significant digits.

use std::path::Path;

use qhlab_core::{ComplexField, HydroField};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
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

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

pub fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<Cell>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(CliError::usage(format!("row has {} cells, header has {}", row.len(), header.len())));
        }
        w.write_record(row.iter().map(Cell::render))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_complex_field(path: &Path, psi: &ComplexField) -> Result<()> {
    let g = psi.grid();
    let rows = psi.values().iter().enumerate().map(|(i, v)| vec![g.x(i).into(), v.re.into(), v.im.into()]);
    write_table(path, &["x", "re_psi", "im_psi"], rows)
}

pub fn write_hydro_field(path: &Path, h: &HydroField) -> Result<()> {
    let g = h.grid();
    let rows = (0..g.len()).map(|i| vec![g.x(i).into(), h.rho()[i].into(), h.current()[i].into()]);
    write_table(path, &["x", "rho", "J"], rows)
}

/// Reads named numeric columns; non-numeric cells become NaN.
pub fn read_columns(path: &Path, names: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    let idx = names
        .iter()
        .map(|n| {
            headers
                .iter()
                .position(|h| h == *n)
                .ok_or_else(|| CliError::usage(format!("{}: no column `{n}`", path.display())))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cols = vec![Vec::new(); names.len()];
    for rec in r.records() {
        let rec = rec?;
        for (c, &i) in cols.iter_mut().zip(&idx) {
            c.push(rec.get(i).and_then(|s| s.trim().parse().ok()).unwrap_or(f64::NAN));
        }
    }
    if cols.first().is_none_or(Vec::is_empty) {
        return Err(CliError::usage(format!("{}: no data rows", path.display())));
    }
    Ok(cols)
}
