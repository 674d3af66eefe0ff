//! Fixtures for the engine benchmarks.

use superact_core::linalg::CMatrix;
use superact_core::Complex64;

/// Deterministic dense Hermitian matrix with distinct eigenvalues.
pub fn dense_hermitian(dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |i, j| {
        let (a, b) = (i as f64, j as f64);
        if i == j {
            Complex64::new(a + 1.0, 0.0)
        } else {
            let (lo, hi) = if i < j { (a, b) } else { (b, a) };
            let im = (0.3 * (lo + 2.0 * hi)).sin() * 0.5;
            Complex64::new((0.7 * (lo * hi + 1.0)).cos() * 0.5, if i < j { im } else { -im })
        }
    })
}
