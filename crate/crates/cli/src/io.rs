//! Ideal, matrix and syzygy files.

use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use syzygy_core::ideal_io::{read_json, read_text, write_json, write_text};
use syzygy_core::syzygy::{syzygy_from_json, syzygy_to_json, Syzygy, SyzygyJson};
use syzygy_core::{Matrix, PrimeField, QuadricIdeal};

use crate::report::UsageError;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "json")
}

/// Reads an ideal as JSON (`.json`) or text (anything else).
pub fn load_ideal(path: &Path, default_p: u64) -> Result<QuadricIdeal> {
    let s = read(path)?;
    let ideal = if is_json(path) {
        read_json(&s)
    } else {
        read_text(&s, default_p)
    };
    ideal.with_context(|| format!("invalid ideal file {}", path.display()))
}

pub fn save_ideal(path: &Path, ideal: &QuadricIdeal) -> Result<()> {
    let s = if is_json(path) {
        write_json(ideal)
    } else {
        write_text(ideal)
    };
    write(path, &s)
}

/// A matrix over `F_p` with entries stored as signed representatives.
#[derive(Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub p: u64,
    pub rows: Vec<Vec<i64>>,
}

pub fn matrix_json(m: &Matrix) -> MatrixJson {
    let f = m.field();
    MatrixJson {
        p: f.p(),
        rows: signed_rows(m),
    }
}

pub fn signed_rows(m: &Matrix) -> Vec<Vec<i64>> {
    let f = m.field();
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|&v| f.to_signed(v)).collect())
        .collect()
}

pub fn load_matrix(path: &Path, field: PrimeField) -> Result<Matrix> {
    let j: MatrixJson = serde_json::from_str(&read(path)?)
        .with_context(|| format!("invalid matrix file {}", path.display()))?;
    if j.p != field.p() {
        return Err(UsageError(format!(
            "matrix file is over F_{} but the ideal is over F_{}",
            j.p,
            field.p()
        ))
        .into());
    }
    let cols = j.rows.first().map_or(0, Vec::len);
    if j.rows.iter().any(|r| r.len() != cols) {
        return Err(UsageError(format!("ragged matrix in {}", path.display())).into());
    }
    Ok(Matrix::from_i64_rows(field, cols, &j.rows))
}

pub fn save_matrix(path: &Path, m: &Matrix) -> Result<()> {
    write(path, &serde_json::to_string_pretty(&matrix_json(m))?)
}

pub fn load_syzygy(path: &Path, ideal: &QuadricIdeal) -> Result<Syzygy> {
    let j: SyzygyJson = serde_json::from_str(&read(path)?)
        .with_context(|| format!("invalid syzygy file {}", path.display()))?;
    syzygy_from_json(ideal, &j).with_context(|| format!("syzygy in {}", path.display()))
}

pub fn save_syzygy(path: &Path, ideal: &QuadricIdeal, s: &Syzygy) -> Result<()> {
    write(path, &serde_json::to_string_pretty(&syzygy_to_json(ideal, s))?)
}
