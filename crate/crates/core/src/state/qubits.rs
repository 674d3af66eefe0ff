//! Index arithmetic on raw `2^n x 2^n` operators.
//!
//! Ordering is big-endian: qubit 0 is the most significant bit of a basis index, so
//! `|q0 q1 q2>` has index `4 q0 + 2 q1 + q2`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, ZERO};

#[inline]
pub(crate) fn bit(index: usize, n_qubits: usize, qubit: usize) -> usize {
    (index >> (n_qubits - 1 - qubit)) & 1
}

/// Extract the bits of `index` at `qubits` (in the listed order) as a packed integer.
pub(crate) fn gather(index: usize, n_qubits: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .fold(0, |acc, &q| (acc << 1) | bit(index, n_qubits, q))
}

/// Write the packed `value` into the bits of `index` at `qubits`.
pub(crate) fn scatter(index: usize, n_qubits: usize, qubits: &[usize], value: usize) -> usize {
    let k = qubits.len();
    let mut out = index;
    for (pos, &q) in qubits.iter().enumerate() {
        let shift = n_qubits - 1 - q;
        let b = (value >> (k - 1 - pos)) & 1;
        out = (out & !(1 << shift)) | (b << shift);
    }
    out
}

pub(crate) fn validate_qubits(n_qubits: usize, qubits: &[usize]) -> Result<()> {
    let mut seen = vec![false; n_qubits];
    for &q in qubits {
        if q >= n_qubits {
            return Err(Error::IndexOutOfRange {
                what: "qubit",
                index: q,
                limit: n_qubits,
            });
        }
        if seen[q] {
            return Err(Error::InvalidPartition(format!("qubit {q} listed twice")));
        }
        seen[q] = true;
    }
    Ok(())
}

fn complement(n_qubits: usize, qubits: &[usize]) -> Vec<usize> {
    (0..n_qubits).filter(|q| !qubits.contains(q)).collect()
}

/// Trace out every qubit not in `keep`. Kept qubits appear in the listed order.
pub fn partial_trace(m: &CMatrix, n_qubits: usize, keep: &[usize]) -> Result<CMatrix> {
    validate_qubits(n_qubits, keep)?;
    let traced = complement(n_qubits, keep);
    let dk = 1usize << keep.len();
    let dt = 1usize << traced.len();
    let mut out = CMatrix::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            let mut acc = ZERO;
            for t in 0..dt {
                let row = scatter(scatter(0, n_qubits, keep, i), n_qubits, &traced, t);
                let col = scatter(scatter(0, n_qubits, keep, j), n_qubits, &traced, t);
                acc += m[(row, col)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Transpose the tensor factors belonging to `qubits`.
pub fn partial_transpose(m: &CMatrix, n_qubits: usize, qubits: &[usize]) -> Result<CMatrix> {
    validate_qubits(n_qubits, qubits)?;
    let d = 1usize << n_qubits;
    let mut out = CMatrix::zeros(d, d);
    for row in 0..d {
        for col in 0..d {
            let r = gather(row, n_qubits, qubits);
            let c = gather(col, n_qubits, qubits);
            let new_row = scatter(row, n_qubits, qubits, c);
            let new_col = scatter(col, n_qubits, qubits, r);
            out[(new_row, new_col)] = m[(row, col)];
        }
    }
    Ok(out)
}

/// `<psi| m |psi>` with `psi` living on `measured`; the result acts on the remaining
/// qubits in ascending order.
pub fn project(
    m: &CMatrix,
    n_qubits: usize,
    psi: &[Complex64],
    measured: &[usize],
) -> Result<CMatrix> {
    validate_qubits(n_qubits, measured)?;
    if measured.len() >= n_qubits {
        return Err(Error::InvalidPartition(
            "projection must leave at least one qubit".into(),
        ));
    }
    let dm = 1usize << measured.len();
    if psi.len() != dm {
        return Err(Error::DimensionMismatch {
            expected: dm,
            found: psi.len(),
        });
    }
    let rest = complement(n_qubits, measured);
    let dr = 1usize << rest.len();
    let mut out = CMatrix::zeros(dr, dr);
    for i in 0..dr {
        let base_i = scatter(0, n_qubits, &rest, i);
        for j in 0..dr {
            let base_j = scatter(0, n_qubits, &rest, j);
            let mut acc = ZERO;
            for s in 0..dm {
                if psi[s] == ZERO {
                    continue;
                }
                let row = scatter(base_i, n_qubits, measured, s);
                for t in 0..dm {
                    if psi[t] == ZERO {
                        continue;
                    }
                    let col = scatter(base_j, n_qubits, measured, t);
                    acc += psi[s].conj() * m[(row, col)] * psi[t];
                }
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// `U m U^dagger` with `U = I x ... x op x ... x I`, `op` acting on `qubit`.
pub fn conjugate_local(
    m: &CMatrix,
    n_qubits: usize,
    op: &[[Complex64; 2]; 2],
    qubit: usize,
) -> Result<CMatrix> {
    validate_qubits(n_qubits, &[qubit])?;
    let d = 1usize << n_qubits;
    let shift = n_qubits - 1 - qubit;
    let mask = 1usize << shift;
    // left multiply
    let mut left = CMatrix::zeros(d, d);
    for row in 0..d {
        let b = (row >> shift) & 1;
        let r0 = row & !mask;
        let r1 = row | mask;
        for col in 0..d {
            left[(row, col)] = op[b][0] * m[(r0, col)] + op[b][1] * m[(r1, col)];
        }
    }
    // right multiply by op^dagger
    let mut out = CMatrix::zeros(d, d);
    for col in 0..d {
        let b = (col >> shift) & 1;
        let c0 = col & !mask;
        let c1 = col | mask;
        for row in 0..d {
            out[(row, col)] = left[(row, c0)] * op[b][0].conj() + left[(row, c1)] * op[b][1].conj();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gather_scatter_roundtrip() {
        let qubits = [2, 0];
        for index in 0..8 {
            let v = gather(index, 3, &qubits);
            assert_eq!(scatter(index, 3, &qubits, v), index);
        }
        // |q0 q1 q2> = |1 0 1>, gather (2, 0) -> bits (1, 1)
        assert_eq!(gather(0b101, 3, &qubits), 0b11);
        assert_eq!(scatter(0, 3, &[1], 1), 0b010);
    }

    #[test]
    fn validate_rejects_bad_indices() {
        assert!(validate_qubits(3, &[3]).is_err());
        assert!(validate_qubits(3, &[1, 1]).is_err());
        assert!(validate_qubits(3, &[0, 2]).is_ok());
    }
}
