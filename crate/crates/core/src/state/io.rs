//! JSON exchange format: `{"n_qubits": k, "re": [[...]], "im": [[...]]}` with
//! row-major `2^k x 2^k` arrays.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrixFile {
    pub n_qubits: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl DensityMatrixFile {
    pub fn from_matrix(n_qubits: usize, m: &CMatrix) -> Self {
        let rows = |f: fn(&Complex64) -> f64| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        Self {
            n_qubits,
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.n_qubits == 0 || self.n_qubits > super::MAX_QUBITS {
            return Err(Error::Parse(format!(
                "n_qubits = {} outside 1..={}",
                self.n_qubits,
                super::MAX_QUBITS
            )));
        }
        let d = 1usize << self.n_qubits;
        let shape_ok = |a: &Vec<Vec<f64>>| a.len() == d && a.iter().all(|r| r.len() == d);
        if !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(Error::Parse(format!(
                "`re` and `im` must both be {d}x{d} arrays"
            )));
        }
        Ok(CMatrix::from_fn(d, d, |i, j| {
            Complex64::new(self.re[i][j], self.im[i][j])
        }))
    }
}

impl DensityMatrix {
    /// Parse and validate (Hermiticity, unit trace, positivity).
    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: DensityMatrixFile =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        DensityMatrix::new(file.to_matrix()?)
    }

    pub fn to_file(&self) -> DensityMatrixFile {
        DensityMatrixFile::from_matrix(self.n_qubits, &self.matrix)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("plain numeric data serializes")
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_file().serialize(s)
    }
}
