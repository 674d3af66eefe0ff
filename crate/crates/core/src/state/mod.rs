//! Multi-qubit states: pure amplitude vectors, density matrices and the subsystem
//! bookkeeping used to trace, transpose and project them.

mod io;
pub mod qubits;

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit_interval, Error, Result};
use crate::linalg::{self, CMatrix, ONE, ZERO};

pub use io::DensityMatrixFile;

pub const MAX_QUBITS: usize = 8;
pub const PURE_NORM_TOLERANCE: f64 = 1e-12;
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;
pub const TRACE_TOLERANCE: f64 = 1e-10;
pub const PSD_TOLERANCE: f64 = -1e-9;

/// Weight below which a post-selected branch cannot be normalized.
pub const DEGENERATE_WEIGHT: f64 = 1e-14;

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::InvalidState(format!(
            "dimension {dim} is not a power of two >= 2"
        )));
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::InvalidState(format!(
            "{n} qubits exceeds the supported maximum of {MAX_QUBITS}"
        )));
    }
    Ok(n)
}

/// Plus/minus branch label of the GHZ basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// A normalized pure state on `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: DVector<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n_qubits = qubits_for_dim(amplitudes.len())?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > PURE_NORM_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "squared amplitudes sum to {norm}, expected 1"
            )));
        }
        Ok(Self {
            n_qubits,
            amplitudes: DVector::from_vec(amplitudes),
        })
    }

    /// Build from real amplitudes, normalizing them.
    pub fn from_real_unnormalized(amplitudes: &[f64]) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::new(
            amplitudes
                .iter()
                .map(|&a| Complex64::new(a / norm, 0.0))
                .collect(),
        )
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange {
                what: "basis state",
                index,
                limit: dim,
            });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Self::new(amps)
    }

    /// `cos(theta)|0> + sin(theta) e^{i phi}|1>`.
    pub fn qubit(theta: f64, phi: f64) -> Self {
        Self {
            n_qubits: 1,
            amplitudes: DVector::from_vec(vec![
                Complex64::new(theta.cos(), 0.0),
                Complex64::from_polar(theta.sin(), phi),
            ]),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.amplitudes.as_slice()
    }

    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn projector(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix::from_parts(self.n_qubits, m, true)
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        PureState {
            n_qubits: self.n_qubits + other.n_qubits,
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }
}

/// `|G_index^sign>`: `(|x> +- |~x>)/sqrt(2)` with `x` = 000, 001, 010, 100.
pub fn make_ghz(index: usize, sign: Sign) -> Result<PureState> {
    const FIRST: [usize; 4] = [0b000, 0b001, 0b010, 0b100];
    let Some(&first) = FIRST.get(index) else {
        return Err(Error::IndexOutOfRange {
            what: "GHZ index",
            index,
            limit: 4,
        });
    };
    let mut amps = vec![ZERO; 8];
    amps[first] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amps[7 - first] = Complex64::new(sign.value() * FRAC_1_SQRT_2, 0.0);
    PureState::new(amps)
}

/// `(|001> + |010> + |100>)/sqrt(3)`.
pub fn w_state() -> PureState {
    let mut amps = [0.0; 8];
    amps[0b001] = 1.0;
    amps[0b010] = 1.0;
    amps[0b100] = 1.0;
    PureState::from_real_unnormalized(&amps).expect("nonzero")
}

/// `(|00> + |11>)/sqrt(2)`.
pub fn bell_phi_plus() -> PureState {
    PureState::from_real_unnormalized(&[1.0, 0.0, 0.0, 1.0]).expect("nonzero")
}

/// Labels for the parties of a [`SubsystemPartition`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
    C,
    Kept,
    Measured,
}

/// Assignment of every qubit of a register to exactly one labelled party.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemPartition {
    n_qubits: usize,
    parties: Vec<(Party, Vec<usize>)>,
}

impl SubsystemPartition {
    pub fn new(n_qubits: usize, parties: Vec<(Party, Vec<usize>)>) -> Result<Self> {
        let mut seen = vec![false; n_qubits];
        for (i, (label, qubits)) in parties.iter().enumerate() {
            if parties[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::InvalidPartition(format!("label {label:?} repeated")));
            }
            for &q in qubits {
                if q >= n_qubits {
                    return Err(Error::IndexOutOfRange {
                        what: "qubit",
                        index: q,
                        limit: n_qubits,
                    });
                }
                if seen[q] {
                    return Err(Error::InvalidPartition(format!(
                        "qubit {q} assigned to more than one party"
                    )));
                }
                seen[q] = true;
            }
        }
        if let Some(q) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!(
                "qubit {q} not assigned to any party"
            )));
        }
        Ok(Self { n_qubits, parties })
    }

    /// `keep` labelled [`Party::Kept`], everything else [`Party::Measured`].
    pub fn kept(n_qubits: usize, keep: &[usize]) -> Result<Self> {
        let rest = (0..n_qubits).filter(|q| !keep.contains(q)).collect();
        Self::new(
            n_qubits,
            vec![(Party::Kept, keep.to_vec()), (Party::Measured, rest)],
        )
    }

    /// Cut `A | B` with `a` on the A side.
    pub fn bipartition(n_qubits: usize, a: &[usize]) -> Result<Self> {
        let rest = (0..n_qubits).filter(|q| !a.contains(q)).collect();
        Self::new(n_qubits, vec![(Party::A, a.to_vec()), (Party::B, rest)])
    }

    /// One party per qubit of a three-qubit register.
    pub fn tripartite() -> Self {
        Self::new(
            3,
            vec![(Party::A, vec![0]), (Party::B, vec![1]), (Party::C, vec![2])],
        )
        .expect("static partition")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Qubits of `party`, empty when the label is absent.
    pub fn qubits(&self, party: Party) -> &[usize] {
        self.parties
            .iter()
            .find(|(l, _)| *l == party)
            .map(|(_, q)| q.as_slice())
            .unwrap_or(&[])
    }

    fn require(&self, party: Party, n_qubits: usize) -> Result<&[usize]> {
        if self.n_qubits != n_qubits {
            return Err(Error::DimensionMismatch {
                expected: n_qubits,
                found: self.n_qubits,
            });
        }
        let q = self.qubits(party);
        if q.is_empty() {
            return Err(Error::InvalidPartition(format!("party {party:?} is empty")));
        }
        Ok(q)
    }
}

/// A density operator on `n_qubits` qubits.
///
/// States flagged normalized have unit trace. Unnormalized states (post-selection
/// intermediates) are positive semidefinite with arbitrary trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: CMatrix,
    normalized: bool,
}

impl DensityMatrix {
    /// Validate a normalized density matrix.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::validated(matrix, true)
    }

    /// Validate a positive semidefinite operator with arbitrary trace.
    pub fn unnormalized(matrix: CMatrix) -> Result<Self> {
        Self::validated(matrix, false)
    }

    fn validated(matrix: CMatrix, normalized: bool) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState(format!(
                "matrix is {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let n_qubits = qubits_for_dim(matrix.nrows())?;
        let deviation = linalg::hermiticity_deviation(&matrix);
        if !(deviation <= HERMITIAN_TOLERANCE) {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = linalg::trace(&matrix).re;
        if normalized && !((tr - 1.0).abs() <= TRACE_TOLERANCE) {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let lambda_min = linalg::min_eigenvalue(&matrix)?;
        let floor = PSD_TOLERANCE * if normalized { 1.0 } else { tr.max(1.0) };
        if lambda_min < floor {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {lambda_min:.3e} is negative"
            )));
        }
        Ok(Self {
            n_qubits,
            matrix,
            normalized,
        })
    }

    /// Wrap a matrix produced by a trusted closed form.
    pub(crate) fn from_parts(n_qubits: usize, matrix: CMatrix, normalized: bool) -> Self {
        debug_assert_eq!(matrix.nrows(), 1 << n_qubits);
        Self {
            n_qubits,
            matrix,
            normalized,
        }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        Self::from_parts(
            n_qubits,
            CMatrix::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0),
            true,
        )
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.matrix).re
    }

    /// Rescale to unit trace.
    pub fn normalize(&self) -> Result<Self> {
        let tr = self.trace();
        if !(tr > DEGENERATE_WEIGHT) {
            return Err(Error::DegenerateProjection { weight: tr });
        }
        Ok(Self::from_parts(
            self.n_qubits,
            &self.matrix * Complex64::new(1.0 / tr, 0.0),
            true,
        ))
    }

    /// Weighted sum `sum_k w_k rho_k`; all terms must share a qubit count.
    pub fn mixture(terms: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::InvalidState("empty mixture".into()));
        };
        let n = first.n_qubits;
        let mut acc = CMatrix::zeros(first.dim(), first.dim());
        for (w, rho) in terms {
            if rho.n_qubits != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: rho.n_qubits,
                });
            }
            acc += &rho.matrix * Complex64::new(*w, 0.0);
        }
        let tr = linalg::trace(&acc).re;
        Ok(Self::from_parts(n, acc, (tr - 1.0).abs() <= TRACE_TOLERANCE))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix).expect("density matrices are Hermitian")
    }

    /// Kronecker product, qubits of `self` first.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self::from_parts(
            self.n_qubits + other.n_qubits,
            self.matrix.kronecker(&other.matrix),
            self.normalized && other.normalized,
        )
    }

    /// Reduced state on the qubits labelled [`Party::Kept`].
    pub fn partial_trace(&self, keep: &SubsystemPartition) -> Result<DensityMatrix> {
        let kept = keep.require(Party::Kept, self.n_qubits)?;
        let m = qubits::partial_trace(&self.matrix, self.n_qubits, kept)?;
        Ok(Self::from_parts(kept.len(), m, self.normalized))
    }

    /// Partial transpose of the qubits labelled `party`. The result is Hermitian but in
    /// general not positive, so it is returned as a bare operator.
    pub fn partial_transpose(&self, partition: &SubsystemPartition, party: Party) -> Result<CMatrix> {
        let q = partition.require(party, self.n_qubits)?;
        qubits::partial_transpose(&self.matrix, self.n_qubits, q)
    }

    /// `<psi| rho |psi>` with `psi` on the [`Party::Measured`] qubits.
    ///
    /// Returns the post-measurement state on the remaining qubits together with its
    /// weight (trace). With `normalize` set the state is rescaled to unit trace and a
    /// weight below [`DEGENERATE_WEIGHT`] is an error.
    pub fn project_subsystem(
        &self,
        psi: &PureState,
        partition: &SubsystemPartition,
        normalize: bool,
    ) -> Result<(DensityMatrix, f64)> {
        let measured = partition.require(Party::Measured, self.n_qubits)?;
        if psi.n_qubits() != measured.len() {
            return Err(Error::DimensionMismatch {
                expected: measured.len(),
                found: psi.n_qubits(),
            });
        }
        let m = qubits::project(&self.matrix, self.n_qubits, psi.amplitudes(), measured)?;
        let weight = linalg::trace(&m).re;
        let rest = self.n_qubits - measured.len();
        let out = Self::from_parts(rest, m, false);
        if normalize {
            if !(weight >= DEGENERATE_WEIGHT) {
                return Err(Error::DegenerateProjection { weight });
            }
            Ok((out.normalize()?, weight))
        } else {
            Ok((out, weight))
        }
    }

    /// `<psi| rho |psi>`.
    pub fn fidelity_with_pure(&self, psi: &PureState) -> Result<f64> {
        if psi.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: psi.n_qubits(),
            });
        }
        let v = &psi.amplitudes;
        Ok((v.adjoint() * &self.matrix * v)[(0, 0)].re)
    }

    /// Conjugate by a single-qubit operator acting on `qubit`.
    pub fn apply_local(&self, op: &[[Complex64; 2]; 2], qubit: usize) -> Result<DensityMatrix> {
        let m = qubits::conjugate_local(&self.matrix, self.n_qubits, op, qubit)?;
        Ok(Self::from_parts(self.n_qubits, m, self.normalized))
    }

    /// Largest violation of the state invariants: (Hermiticity, |trace - 1|, -lambda_min).
    pub fn invariant_report(&self) -> (f64, f64, f64) {
        (
            linalg::hermiticity_deviation(&self.matrix),
            (self.trace() - 1.0).abs(),
            -self.eigenvalues()[0],
        )
    }
}

/// Single-qubit gates as 2x2 arrays.
pub mod gates {
    use num_complex::Complex64;

    const O: Complex64 = Complex64::new(0.0, 0.0);
    const I1: Complex64 = Complex64::new(1.0, 0.0);

    pub const IDENTITY: [[Complex64; 2]; 2] = [[I1, O], [O, I1]];
    pub const PAULI_X: [[Complex64; 2]; 2] = [[O, I1], [I1, O]];
    pub const PAULI_Y: [[Complex64; 2]; 2] =
        [[O, Complex64::new(0.0, -1.0)], [Complex64::new(0.0, 1.0), O]];
    pub const PAULI_Z: [[Complex64; 2]; 2] = [[I1, O], [O, Complex64::new(-1.0, 0.0)]];
}

/// `p |G_0^+><G_0^+| + (1 - p) I/8`.
pub fn noisy_ghz(p: f64) -> Result<DensityMatrix> {
    check_unit_interval("p", p)?;
    let ghz = make_ghz(0, Sign::Plus)?.projector();
    DensityMatrix::mixture(&[(p, &ghz), (1.0 - p, &DensityMatrix::maximally_mixed(3))])
}

/// GHZ-diagonal noise model: white-noise weight `1 - p`, phase-flip parameter `q`,
/// bit-flip parameter `r`.
///
/// `p [ r rho_0 + (1 - r)/3 (rho_1 + rho_2 + rho_3) ] + (1 - p) I/8` with
/// `rho_i = q |G_i^+><G_i^+| + (1 - q) |G_i^-><G_i^-|`.
pub fn noise_model_state(p: f64, q: f64, r: f64) -> Result<DensityMatrix> {
    check_unit_interval("p", p)?;
    check_unit_interval("q", q)?;
    check_unit_interval("r", r)?;
    let mut terms = Vec::with_capacity(9);
    let mut owned = Vec::with_capacity(8);
    for i in 0..4 {
        let weight = if i == 0 { r } else { (1.0 - r) / 3.0 };
        owned.push((p * weight * q, make_ghz(i, Sign::Plus)?.projector()));
        owned.push((p * weight * (1.0 - q), make_ghz(i, Sign::Minus)?.projector()));
    }
    let mixed = DensityMatrix::maximally_mixed(3);
    terms.extend(owned.iter().map(|(w, rho)| (*w, rho)));
    terms.push((1.0 - p, &mixed));
    DensityMatrix::mixture(&terms)
}

/// `p |W><W| + (1 - p) I/8`.
pub fn noisy_w(p: f64) -> Result<DensityMatrix> {
    check_unit_interval("p", p)?;
    let w = w_state().projector();
    DensityMatrix::mixture(&[(p, &w), (1.0 - p, &DensityMatrix::maximally_mixed(3))])
}

/// `p |Phi+><Phi+| + (1 - p) I/4`.
pub fn noisy_bell(p: f64) -> Result<DensityMatrix> {
    check_unit_interval("p", p)?;
    let bell = bell_phi_plus().projector();
    DensityMatrix::mixture(&[(p, &bell), (1.0 - p, &DensityMatrix::maximally_mixed(2))])
}

#[cfg(test)]
mod tests;
