//! CSV tables. Every file starts with a header row; the column sets are
//! listed in the README.

use std::path::Path;

use serde::Serialize;

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthRow {
    pub t: f64,
    #[serde(rename = "Hs_norm")]
    pub hs_norm: f64,
    pub s: f64,
    pub fitted_slope: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayRow {
    pub t: f64,
    pub h: f64,
    pub sup_u: f64,
    pub envelope: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayProfileRow {
    pub t: f64,
    pub h: f64,
    #[serde(rename = "sup|u|")]
    pub sup_u: f64,
    pub envelope: f64,
    #[serde(rename = "fitted C")]
    pub fitted_c: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitRow {
    pub t: f64,
    #[serde(rename = "λ")]
    pub lambda: f64,
    #[serde(rename = "θ")]
    pub theta: f64,
    pub y: f64,
    pub r: f64,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConservedRow {
    pub t: f64,
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
    pub sup_u: f64,
    pub modes: usize,
    pub dt: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenRow {
    pub t: f64,
    pub index: usize,
    pub eigenvalue: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub amplitude: f64,
    pub mass: f64,
    pub lowest_eigenvalue: f64,
    pub count: usize,
    pub count_with_edge: usize,
    pub bound_holds: bool,
    pub h1_start: f64,
    pub h1_end: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailRow {
    pub t: f64,
    #[serde(rename = "λ")]
    pub lambda: f64,
    pub tail_constant: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormRow {
    pub t: f64,
    pub s: f64,
    pub norm: f64,
}

/// Column names of a row type, used for header-only files.
pub trait Columns {
    const COLUMNS: &'static [&'static str];
}

macro_rules! columns {
    ($($ty:ty => [$($c:expr),*]),* $(,)?) => {
        $(impl Columns for $ty { const COLUMNS: &'static [&'static str] = &[$($c),*]; })*
    };
}

columns! {
    GrowthRow => ["t", "Hs_norm", "s", "fitted_slope"],
    DecayRow => ["t", "h", "sup_u", "envelope"],
    DecayProfileRow => ["t", "h", "sup|u|", "envelope", "fitted C"],
    FitRow => ["t", "λ", "θ", "y", "r", "converged"],
    ConservedRow => ["t", "mass", "momentum", "energy", "sup_u", "modes", "dt"],
    EigenRow => ["t", "index", "eigenvalue"],
    ThresholdRow => ["amplitude", "mass", "lowest_eigenvalue", "count", "count_with_edge", "bound_holds", "h1_start", "h1_end"],
    TailRow => ["t", "λ", "tail_constant"],
    NormRow => ["t", "s", "norm"],
}

pub fn write<R: Serialize + Columns>(path: &Path, rows: &[R]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(R::COLUMNS)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| crate::error::LabError::io(path, e))?;
    Ok(())
}

/// Appends rows to an existing table, or writes a new one.
pub fn append<R: Serialize + Columns>(path: &Path, rows: &[R]) -> Result<()> {
    if !path.exists() {
        return write(path, rows);
    }
    let file = std::fs::OpenOptions::new().append(true).open(path).map_err(|e| crate::error::LabError::io(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| crate::error::LabError::io(path, e))?;
    Ok(())
}

/// Rows of a numeric table as (header, values).
pub fn read_numeric(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push(
            rec.iter()
                .map(|s| match s {
                    "true" => 1.0,
                    "false" => 0.0,
                    _ => s.parse().unwrap_or(f64::NAN),
                })
                .collect(),
        );
    }
    Ok((header, rows))
}
