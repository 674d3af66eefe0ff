//! PPT-mixer witness for three qubits.
//!
//! ```text
//! minimize   tr(W rho)
//! subject to tr W = 1,  W = P_i + Q_i^{T_i},  P_i >= 0,  Q_i >= 0,  i in {A, B, C}
//! ```
//!
//! Solved by ADMM over `x = (W, P_i, Q'_i)` with `Q'_i = Q_i^{T_i}`. The affine set
//! `{tr W = 1, W = P_i + Q'_i}` has a closed-form Euclidean projection; the cone is
//! `free x PSD^3 x (PSD^{T_i})^3`, projected by eigenvalue clipping (the partial
//! transpose is an orthogonal involution, so the projection onto its image of the PSD
//! cone is conjugation of the plain PSD projection).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, hs_inner, min_eigenvalue, project_psd, serialize_matrix, trace, CMatrix};
use crate::state::{qubits::partial_transpose, DensityMatrix, Party};

const PARTIES: [Party; 3] = [Party::A, Party::B, Party::C];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Bound on `||W - P_i - Q_i^{T_i}||_F` at termination.
    pub feasibility_tolerance: f64,
    /// Objective change over `stagnation_window` iterations below which the run stops.
    pub stagnation_tolerance: f64,
    pub stagnation_window: usize,
    pub max_iterations: usize,
    /// ADMM penalty parameter.
    pub step: f64,
    /// Over-relaxation factor in `(0, 2)`.
    pub relaxation: f64,
    /// `optimal_value` must clear this band around zero for a sign to be certified.
    pub sign_margin: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            feasibility_tolerance: 1e-7,
            stagnation_tolerance: 1e-9,
            stagnation_window: 100,
            max_iterations: 200_000,
            step: 1.0,
            relaxation: 1.6,
            sign_margin: 1e-5,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::ParameterOutOfRange {
                    name,
                    value: v,
                    min: 0.0,
                    max: f64::INFINITY,
                })
            }
        };
        positive("feasibility_tolerance", self.feasibility_tolerance)?;
        positive("stagnation_tolerance", self.stagnation_tolerance)?;
        positive("step", self.step)?;
        positive("sign_margin", self.sign_margin)?;
        if !(self.relaxation > 0.0 && self.relaxation < 2.0) {
            return Err(Error::ParameterOutOfRange {
                name: "relaxation",
                value: self.relaxation,
                min: 0.0,
                max: 2.0,
            });
        }
        if self.stagnation_window == 0 || self.max_iterations == 0 {
            return Err(Error::InvalidSetting(
                "stagnation_window and max_iterations must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Sign of the optimum as far as the solver can vouch for it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertifiedSign {
    /// Negative beyond the margin: the state is genuinely multipartite entangled.
    Negative,
    Positive,
    Indeterminate,
}

/// `W = P + Q^{T_party}` for one bipartition.
#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    pub party: Party,
    #[serde(serialize_with = "serialize_matrix")]
    pub p: CMatrix,
    #[serde(serialize_with = "serialize_matrix")]
    pub q: CMatrix,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessResult {
    pub optimal_value: f64,
    #[serde(serialize_with = "serialize_matrix")]
    pub witness: CMatrix,
    pub decompositions: Vec<Decomposition>,
    /// `||W - P_i - Q_i^{T_i}||_F` per bipartition, in `A, B, C` order.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub sign: CertifiedSign,
}

impl WitnessResult {
    /// Recheck the certificate from its matrices alone. Returns the largest violation among
    /// `|tr W - 1|`, the decomposition residuals and `-lambda_min` of every `P_i`, `Q_i`.
    pub fn certificate_violation(&self) -> Result<f64> {
        let mut worst = (trace(&self.witness).re - 1.0).abs();
        for d in &self.decompositions {
            let qt = partial_transpose(&d.q, 3, &[party_qubit(d.party)])?;
            worst = worst.max(frobenius_norm(&(&self.witness - &d.p - qt)));
            worst = worst.max(-min_eigenvalue(&d.p)?);
            worst = worst.max(-min_eigenvalue(&d.q)?);
        }
        Ok(worst)
    }
}

fn party_qubit(party: Party) -> usize {
    match party {
        Party::A => 0,
        Party::B => 1,
        _ => 2,
    }
}

fn pt(m: &CMatrix, k: usize) -> CMatrix {
    partial_transpose(m, 3, &[k]).expect("qubit index below 3")
}

/// ADMM iterate: `[W, P_A, P_B, P_C, Q'_A, Q'_B, Q'_C]`.
type Blocks = [CMatrix; 7];

fn zeros() -> Blocks {
    std::array::from_fn(|_| CMatrix::zeros(8, 8))
}

fn project_affine(v: &Blocks) -> Blocks {
    let d = 8.0;
    let s: Vec<CMatrix> = (0..3).map(|i| &v[1 + i] + &v[4 + i]).collect();
    let mut w = (v[0].scale(2.0) + &s[0] + &s[1] + &s[2]).scale(0.2);
    let shift = (1.0 - trace(&w).re) / d;
    for k in 0..8 {
        w[(k, k)] += shift;
    }
    let mut out = zeros();
    for i in 0..3 {
        let half_gap = (&w - &s[i]).scale(0.5);
        out[1 + i] = &v[1 + i] + &half_gap;
        out[4 + i] = &v[4 + i] + &half_gap;
    }
    out[0] = w;
    out
}

fn project_cone(v: &Blocks) -> Blocks {
    let mut out = zeros();
    out[0] = v[0].clone();
    for i in 0..3 {
        out[1 + i] = project_psd(&crate::linalg::hermitian_part(&v[1 + i]));
        let q = pt(&crate::linalg::hermitian_part(&v[4 + i]), i);
        out[4 + i] = pt(&project_psd(&q), i);
    }
    out
}

fn norm_sq(v: &Blocks) -> f64 {
    v.iter().map(|m| frobenius_norm(m).powi(2)).sum()
}

/// Solve the PPT-mixer program for a three-qubit state.
///
/// Running out of iterations is not an error: the result carries `converged = false`
/// and an indeterminate sign together with the residuals reached.
pub fn ppt_mixer_witness(rho: &DensityMatrix, config: &SolverConfig) -> Result<WitnessResult> {
    config.validate()?;
    if rho.n_qubits() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: rho.n_qubits(),
        });
    }
    let c = rho.matrix();
    let sigma = config.step;
    let alpha = config.relaxation;

    let mut z = zeros();
    let mut u = zeros();
    let mut x = zeros();
    let mut history = std::collections::VecDeque::with_capacity(config.stagnation_window + 1);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_iterations {
        iterations += 1;
        let mut v: Blocks = std::array::from_fn(|k| &z[k] - &u[k]);
        v[0] -= c.scale(1.0 / sigma);
        x = project_affine(&v);
        let relaxed: Blocks = std::array::from_fn(|k| x[k].scale(alpha) + z[k].scale(1.0 - alpha));
        let shifted: Blocks = std::array::from_fn(|k| &relaxed[k] + &u[k]);
        z = project_cone(&shifted);
        for k in 0..7 {
            u[k] += &relaxed[k] - &z[k];
        }

        let gap: Blocks = std::array::from_fn(|k| &x[k] - &z[k]);
        let primal = norm_sq(&gap).sqrt();
        let objective = hs_inner(c, &x[0]);
        history.push_back(objective);
        if history.len() > config.stagnation_window {
            let old = history.pop_front().expect("non-empty window");
            if primal <= config.feasibility_tolerance
                && (objective - old).abs() < config.stagnation_tolerance
            {
                converged = true;
                break;
            }
        }
    }

    let witness = crate::linalg::hermitian_part(&x[0]);
    let mut decompositions = Vec::with_capacity(3);
    let mut residuals = Vec::with_capacity(3);
    for (i, party) in PARTIES.into_iter().enumerate() {
        let p = z[1 + i].clone();
        let q = pt(&z[4 + i], i);
        residuals.push(frobenius_norm(&(&witness - &p - &z[4 + i])));
        decompositions.push(Decomposition { party, p, q });
    }
    let optimal_value = hs_inner(c, &witness);
    let sign = if !converged {
        CertifiedSign::Indeterminate
    } else if optimal_value < -config.sign_margin {
        CertifiedSign::Negative
    } else if optimal_value > config.sign_margin {
        CertifiedSign::Positive
    } else {
        CertifiedSign::Indeterminate
    };
    Ok(WitnessResult {
        optimal_value,
        witness,
        decompositions,
        residuals,
        iterations,
        converged,
        sign,
    })
}
