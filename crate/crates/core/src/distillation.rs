//! Two-copy distillation maps and single-qubit entanglement localization.
//!
//! Both protocols pair qubit `k` of the first copy with qubit `k` of the second copy
//! and reduce each pair to one qubit with a `2 x 4` Kraus operator of the form
//! `sum_b alpha_b |b><bb|`. The joint input register is ordered
//! `(copy1 q0 .. q_{n-1}, copy2 q0 .. q_{n-1})`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{check_unit_interval, Error, Result};
use crate::linalg::{CMatrix, ONE, ZERO};
use crate::state::{gates, DensityMatrix, PureState, SubsystemPartition, DEGENERATE_WEIGHT};

/// A `2 x 4` operator mapping two qubits to one, indexed `[out][2 * b1 + b2]`.
pub type PairReduction = [[Complex64; 4]; 2];

/// Result of a post-selected protocol.
#[derive(Debug, Clone)]
pub struct DistillationOutcome {
    pub state: DensityMatrix,
    pub success_probability: f64,
    pub parity_branch_weights: Vec<(String, f64)>,
}

/// `P = |00><00| + |11><11|`, the PBS parity check, as a 4x4 operator.
pub fn pbs_projector() -> CMatrix {
    let mut p = CMatrix::zeros(4, 4);
    p[(0, 0)] = ONE;
    p[(3, 3)] = ONE;
    p
}

/// `P_+- = (|0><00| +- |1><11|) / sqrt(2)`: the parity check followed by an X-basis
/// measurement of the second photon.
pub fn parity_operators() -> (PairReduction, PairReduction) {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let plus = [[h, ZERO, ZERO, ZERO], [ZERO, ZERO, ZERO, h]];
    let minus = [[h, ZERO, ZERO, ZERO], [ZERO, ZERO, ZERO, -h]];
    (plus, minus)
}

/// `P_0 = |0><00| + |1><11|`: CNOT followed by keeping the `|0>` target outcome.
pub fn cnot_reduction() -> PairReduction {
    [[ONE, ZERO, ZERO, ZERO], [ZERO, ZERO, ZERO, ONE]]
}

/// `K (rho1 x rho2) K^dagger` with `K` the tensor product of one reduction per party.
fn reduce_pairs(joint: &CMatrix, n_parties: usize, ops: &[PairReduction]) -> CMatrix {
    let d_out = 1usize << n_parties;
    let d_in = 1usize << (2 * n_parties);
    let mut kraus = CMatrix::zeros(d_out, d_in);
    for out in 0..d_out {
        for input in 0..d_in {
            let copy1 = input >> n_parties;
            let copy2 = input & (d_out - 1);
            let mut amp = ONE;
            for (k, op) in ops.iter().enumerate() {
                let shift = n_parties - 1 - k;
                let b_out = (out >> shift) & 1;
                let pair = (((copy1 >> shift) & 1) << 1) | ((copy2 >> shift) & 1);
                amp *= op[b_out][pair];
                if amp == ZERO {
                    break;
                }
            }
            kraus[(out, input)] = amp;
        }
    }
    &kraus * joint * kraus.adjoint()
}

fn check_pair(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<usize> {
    if rho1.n_qubits() != rho2.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: rho1.n_qubits(),
            found: rho2.n_qubits(),
        });
    }
    if 2 * rho1.n_qubits() > crate::state::MAX_QUBITS {
        return Err(Error::InvalidState(format!(
            "two copies of {} qubits exceed the register limit",
            rho1.n_qubits()
        )));
    }
    Ok(rho1.n_qubits())
}

/// PBS parity-check distillation of two three-qubit states.
///
/// Every combination of `P_+`/`P_-` across the three parties is evaluated exactly.
/// Branches with an odd number of `-` outcomes get a phase flip on the first party's
/// kept qubit; all branches are then summed and renormalized.
pub fn distill_tripartite(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<DistillationOutcome> {
    let n = check_pair(rho1, rho2)?;
    if n != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: n,
        });
    }
    let joint = rho1.tensor(rho2).into_matrix();
    let (plus, minus) = parity_operators();
    let mut total = CMatrix::zeros(8, 8);
    let mut branches = Vec::with_capacity(8);
    for mask in 0..8usize {
        let ops: Vec<PairReduction> = (0..3)
            .map(|k| if (mask >> (2 - k)) & 1 == 1 { minus } else { plus })
            .collect();
        let label: String = (0..3)
            .map(|k| if (mask >> (2 - k)) & 1 == 1 { '-' } else { '+' })
            .collect();
        let mut branch = reduce_pairs(&joint, 3, &ops);
        if mask.count_ones() % 2 == 1 {
            branch = crate::state::qubits::conjugate_local(&branch, 3, &gates::PAULI_Z, 0)?;
        }
        let weight = crate::linalg::trace(&branch).re;
        branches.push((label, weight));
        total += branch;
    }
    finish(total, 3, branches)
}

/// CNOT-based distillation: `P_0` on every party, keeping the all-`|0>` ancilla outcome.
///
/// The output entries are the elementwise products `rho1_ij * rho2_ij`, renormalized.
pub fn distill_cnot(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<DistillationOutcome> {
    let n = check_pair(rho1, rho2)?;
    let joint = rho1.tensor(rho2).into_matrix();
    let ops = vec![cnot_reduction(); n];
    let out = reduce_pairs(&joint, n, &ops);
    let weight = crate::linalg::trace(&out).re;
    finish(out, n, vec![("0".repeat(n), weight)])
}

fn finish(
    unnormalized: CMatrix,
    n_qubits: usize,
    branches: Vec<(String, f64)>,
) -> Result<DistillationOutcome> {
    let probability = crate::linalg::trace(&unnormalized).re;
    if !(probability >= DEGENERATE_WEIGHT) {
        return Err(Error::DistillationImpossible { probability });
    }
    let state = DensityMatrix::unnormalized(unnormalized)?.normalize()?;
    debug_assert_eq!(state.n_qubits(), n_qubits);
    Ok(DistillationOutcome {
        state,
        success_probability: probability,
        parity_branch_weights: branches,
    })
}

/// Measurement basis for [`localize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LocalizationBasis {
    /// Pauli X; outcome 0 is `|+>`, outcome 1 is `|->`.
    X,
    Computational,
}

/// Measure one qubit of a three-qubit state and keep the given outcome.
///
/// For the X-basis `|->` outcome a phase flip is applied to the first remaining qubit.
/// Returns the normalized two-qubit state and the branch weight.
pub fn localize(
    rho: &DensityMatrix,
    measured_qubit: usize,
    basis: LocalizationBasis,
    outcome: usize,
) -> Result<(DensityMatrix, f64)> {
    if rho.n_qubits() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: rho.n_qubits(),
        });
    }
    if outcome > 1 {
        return Err(Error::IndexOutOfRange {
            what: "measurement outcome",
            index: outcome,
            limit: 2,
        });
    }
    if measured_qubit > 2 {
        return Err(Error::IndexOutOfRange {
            what: "qubit",
            index: measured_qubit,
            limit: 3,
        });
    }
    let psi = match basis {
        LocalizationBasis::Computational => PureState::basis(1, outcome)?,
        LocalizationBasis::X => {
            let h = FRAC_1_SQRT_2;
            let s = if outcome == 0 { h } else { -h };
            PureState::new(vec![Complex64::new(h, 0.0), Complex64::new(s, 0.0)])?
        }
    };
    let keep: Vec<usize> = (0..3).filter(|&q| q != measured_qubit).collect();
    let partition = SubsystemPartition::kept(3, &keep)?;
    let (state, weight) = rho.project_subsystem(&psi, &partition, true)?;
    let state = if basis == LocalizationBasis::X && outcome == 1 {
        state.apply_local(&gates::PAULI_Z, 0)?
    } else {
        state
    };
    Ok((state, weight))
}

/// Closed-form two-copy output for noisy GHZ inputs.
pub fn analytic_distilled_noisy_ghz(p: f64) -> Result<DensityMatrix> {
    check_unit_interval("p", p)?;
    let norm = 3.0 * p * p + 1.0;
    let corner = (3.0 * p + 1.0).powi(2) / 8.0 / norm;
    let inner = (1.0 - p).powi(2) / 8.0 / norm;
    let coherence = 2.0 * p * p / norm;
    let m = CMatrix::from_fn(8, 8, |i, j| {
        let v = match (i, j) {
            (0, 0) | (7, 7) => corner,
            (0, 7) | (7, 0) => coherence,
            _ if i == j => inner,
            _ => 0.0,
        };
        Complex64::new(v, 0.0)
    });
    Ok(DensityMatrix::from_parts(3, m, true))
}

/// `(25p^2 + 6p + 1) / (24p^2 + 8)`: target fidelity after one round of distillation.
pub fn analytic_fidelity_after(p: f64) -> Result<f64> {
    check_unit_interval("p", p)?;
    Ok((25.0 * p * p + 6.0 * p + 1.0) / (24.0 * p * p + 8.0))
}

/// `(13p^2 + 2p + 1) / (4(3p^2 + 1))`: Bell fidelity after distillation followed by
/// X-basis localization.
pub fn analytic_localized_fidelity(p: f64) -> Result<f64> {
    check_unit_interval("p", p)?;
    Ok((13.0 * p * p + 2.0 * p + 1.0) / (4.0 * (3.0 * p * p + 1.0)))
}

/// Component-weight update of one distillation round over the eight GHZ basis states.
///
/// Input and output are ordered `[G0+, G0-, G1+, G1-, G2+, G2-, G3+, G3-]`. Only pairs
/// with equal subscript survive; `+/+` and `-/-` yield `+`, mixed signs yield `-`.
pub fn component_fidelity_update(f: &[f64; 8]) -> Result<[f64; 8]> {
    let total: f64 = f.iter().sum();
    if (total - 1.0).abs() > 1e-9 || f.iter().any(|&x| x < 0.0) {
        return Err(Error::InvalidState(format!(
            "component weights must be a probability vector (sum {total})"
        )));
    }
    let mut out = [0.0; 8];
    let mut survival = 0.0;
    for i in 0..4 {
        let (plus, minus) = (f[2 * i], f[2 * i + 1]);
        out[2 * i] = plus * plus + minus * minus;
        out[2 * i + 1] = 2.0 * plus * minus;
        survival += (plus + minus).powi(2);
    }
    if !(survival > 0.0) {
        return Err(Error::DistillationImpossible {
            probability: survival,
        });
    }
    for x in &mut out {
        *x /= survival;
    }
    Ok(out)
}
