//! JSON state files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::linalg::{BipartiteOperator, ComplexMatrix, DensityMatrix, StateTolerances, C64};

pub const FORMAT_VERSION: u32 = 1;

/// Tolerance on hermiticity, positivity and trace when reading a file.
pub const FILE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub re: f64,
    pub im: f64,
}

/// On-disk form of a density matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub format_version: u32,
    pub dim_a: usize,
    pub dim_b: usize,
    pub matrix: Vec<Vec<Entry>>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StateFileError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error ({field}): {detail}")]
    Validation { field: &'static str, detail: String },
}

fn invalid(field: &'static str, detail: impl Into<String>) -> StateFileError {
    StateFileError::Validation { field, detail: detail.into() }
}

impl StateFile {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        let matrix = (0..m.rows())
            .map(|i| m.row(i).iter().map(|z| Entry { re: z.re, im: z.im }).collect())
            .collect();
        Self { format_version: FORMAT_VERSION, dim_a: rho.dim_a(), dim_b: rho.dim_b(), matrix }
    }

    /// Validates shape, hermiticity, positivity and unit trace.
    pub fn to_state(&self, tol: f64) -> Result<DensityMatrix, StateFileError> {
        if self.format_version != FORMAT_VERSION {
            return Err(invalid("format_version", format!("unsupported version {}", self.format_version)));
        }
        let n = self.matrix.len();
        if self.dim_a == 0 || self.dim_b == 0 || self.dim_a * self.dim_b != n {
            return Err(invalid("dims", format!("{}x{} does not match {n} rows", self.dim_a, self.dim_b)));
        }
        if let Some((i, row)) = self.matrix.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(invalid("square", format!("row {i} has {} entries, expected {n}", row.len())));
        }
        let data: Vec<C64> = self.matrix.iter().flatten().map(|e| C64::new(e.re, e.im)).collect();
        let m = ComplexMatrix::from_vec(n, n, data).map_err(|e| invalid("finite", e.to_string()))?;
        let defect = m.hermiticity_defect();
        if defect > tol {
            return Err(invalid("hermitian", format!("max |M - M^dagger| = {defect:.3e}")));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(invalid("trace", format!("trace is {} (expected 1)", tr.re)));
        }
        let op = BipartiteOperator::new(self.dim_a, self.dim_b, m).map_err(|e| invalid("dims", e.to_string()))?;
        DensityMatrix::with_tolerances(op, StateTolerances::uniform(tol)).map_err(|e| invalid("positive", e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state files serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, StateFileError> {
        serde_json::from_str(text).map_err(|e| StateFileError::Parse(e.to_string()))
    }
}

pub fn write_state(path: &Path, rho: &DensityMatrix) -> std::io::Result<()> {
    fs::write(path, StateFile::from_state(rho).to_json() + "\n")
}

pub fn read_state(path: &Path, tol: f64) -> Result<DensityMatrix, StateFileError> {
    let text = fs::read_to_string(path).map_err(|e| StateFileError::Parse(format!("{}: {e}", path.display())))?;
    StateFile::from_json(&text)?.to_state(tol)
}
