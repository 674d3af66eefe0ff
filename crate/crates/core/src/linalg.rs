//! Small dense complex linear algebra.
//!
//! Everything here works on matrices of dimension at most 256 (eight qubits), and in
//! practice on 4x4 and 8x8 operators. The Hermitian eigensolver is a cyclic Jacobi
//! method: slow asymptotically, but unconditionally stable and accurate to machine
//! precision at these sizes.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix used for every operator in the crate.
pub type CMatrix = DMatrix<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tolerance used to accept an input as Hermitian before diagonalizing it.
pub const EIGEN_HERMITIAN_TOLERANCE: f64 = 1e-8;

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Column `k` of `vectors` is the eigenvector belonging to `values[k]`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// Largest entrywise deviation `|m_ij - conj(m_ji)|`.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `sqrt(sum |m_ij|^2)`.
pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Real part of the Hilbert-Schmidt inner product `tr(a^dagger b)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Symmetrize `(m + m^dagger) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Full eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
pub fn hermitian_eigen(m: &CMatrix) -> Result<HermitianEigen> {
    let deviation = hermiticity_deviation(m);
    if !(deviation <= EIGEN_HERMITIAN_TOLERANCE) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(jacobi(m, true))
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    let deviation = hermiticity_deviation(m);
    if !(deviation <= EIGEN_HERMITIAN_TOLERANCE) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(jacobi(m, false).values)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMatrix) -> Result<f64> {
    hermitian_eigenvalues(m).map(|v| v[0])
}

/// Nearest positive semidefinite matrix in Frobenius norm (negative eigenvalues clipped).
pub(crate) fn project_psd(m: &CMatrix) -> CMatrix {
    let eig = jacobi(m, true);
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda <= 0.0 {
            continue;
        }
        let v = eig.vectors.column(k);
        for j in 0..n {
            let vj = v[j].conj() * lambda;
            for i in 0..n {
                out[(i, j)] += v[i] * vj;
            }
        }
    }
    out
}

/// Row-major `{"re": [[...]], "im": [[...]]}` form of a complex matrix.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MatrixRecord {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&CMatrix> for MatrixRecord {
    fn from(m: &CMatrix) -> Self {
        let rows = |f: fn(&Complex64) -> f64| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        Self {
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }
}

/// `serialize_with` adapter writing a [`CMatrix`] as a [`MatrixRecord`].
pub fn serialize_matrix<S: serde::Serializer>(m: &CMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&MatrixRecord::from(m), s)
}

fn jacobi(m: &CMatrix, want_vectors: bool) -> HermitianEigen {
    let n = m.nrows();
    // Row-major working copy; the input is symmetrized so that tiny anti-Hermitian
    // noise does not leak into the rotations.
    let mut a = vec![ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
        }
    }
    let mut v = if want_vectors {
        let mut v = vec![ZERO; n * n];
        for i in 0..n {
            v[i * n + i] = ONE;
        }
        v
    } else {
        Vec::new()
    };

    let scale: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let threshold = (f64::EPSILON * f64::EPSILON) * scale * 1e-2;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q].norm_sqr();
            }
        }
        if off <= threshold || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a[p * n + q];
                let abs_g = g.norm();
                if abs_g == 0.0 {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                // Skip rotations that cannot change the diagonal in floating point.
                if abs_g < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    a[p * n + q] = ZERO;
                    a[q * n + p] = ZERO;
                    continue;
                }
                let phase_conj = (g / abs_g).conj();
                let tau = (aqq - app) / (2.0 * abs_g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // U restricted to the (p, q) plane.
                let u_pp = Complex64::new(c, 0.0);
                let u_pq = Complex64::new(s, 0.0);
                let u_qp = phase_conj * (-s);
                let u_qq = phase_conj * c;

                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * u_pp + akq * u_qp;
                    a[k * n + q] = akp * u_pq + akq * u_qq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    a[q * n + k] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
                a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
                a[q * n + q] = Complex64::new(a[q * n + q].re, 0.0);

                if want_vectors {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = vkp * u_pp + vkq * u_qp;
                        v[k * n + q] = vkp * u_pq + vkq * u_qq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let values = order.iter().map(|&i| a[i * n + i].re).collect();
    let vectors = if want_vectors {
        CMatrix::from_fn(n, n, |row, col| v[row * n + order[col]])
    } else {
        CMatrix::zeros(0, 0)
    };
    HermitianEigen { values, vectors }
}
