//! X-shaped density matrices and their closed-form GME concurrence.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::DensityMatrix;

/// Off-pattern magnitude above which [`gme_concurrence_x`] refuses a matrix.
pub const X_SHAPE_LEAKAGE_LIMIT: f64 = 1e-8;

/// Diagonal and anti-diagonal blocks of an X-shaped matrix of dimension `d = 2L`.
///
/// `a[i] = rho[i][i]`, `b[i] = rho[d-1-i][d-1-i]`, `c[i] = rho[i][d-1-i]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XShapeView {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<Complex64>,
    pub max_off_pattern_magnitude: f64,
}

impl XShapeView {
    pub fn half_dim(&self) -> usize {
        self.a.len()
    }
}

/// Extract the X pattern. Off-pattern entries of magnitude at most `tolerance` are
/// treated as zero when recording leakage.
pub fn x_shape_view(rho: &DensityMatrix, tolerance: f64) -> XShapeView {
    let d = rho.dim();
    let l = d / 2;
    let m = rho.matrix();
    let mut leak = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            if i == j || i + j == d - 1 {
                continue;
            }
            let v = m[(i, j)].norm();
            if v > tolerance {
                leak = leak.max(v);
            }
        }
    }
    XShapeView {
        a: (0..l).map(|i| m[(i, i)].re).collect(),
        b: (0..l).map(|i| m[(d - 1 - i, d - 1 - i)].re).collect(),
        c: (0..l).map(|i| m[(i, d - 1 - i)]).collect(),
        max_off_pattern_magnitude: leak,
    }
}

/// The per-index terms `|c_i| - sum_{j != i} sqrt(a_j b_j)` before clipping and doubling.
pub fn gme_concurrence_terms(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let view = x_shape_view(rho, 0.0);
    if view.max_off_pattern_magnitude > X_SHAPE_LEAKAGE_LIMIT {
        return Err(Error::NotXShaped {
            leakage: view.max_off_pattern_magnitude,
        });
    }
    let roots: Vec<f64> = view
        .a
        .iter()
        .zip(&view.b)
        .map(|(a, b)| (a * b).max(0.0).sqrt())
        .collect();
    let total: f64 = roots.iter().sum();
    Ok(view
        .c
        .iter()
        .zip(&roots)
        .map(|(c, r)| c.norm() - (total - r))
        .collect())
}

/// `C_GME = 2 max_i {0, |c_i| - sum_{j != i} sqrt(a_j b_j)}`.
pub fn gme_concurrence_x(rho: &DensityMatrix) -> Result<f64> {
    let terms = gme_concurrence_terms(rho)?;
    Ok(2.0 * terms.into_iter().fold(0.0, f64::max))
}
