//! Single-qubit-projection localizable entanglement (SLE).
//!
//! One qubit is projected onto `cos(theta)|0> + sin(theta) e^{i phi}|1>` and the
//! remaining pair is scored. For two qubits the partial transpose has at most one
//! negative eigenvalue and the negativity is `log2(1 + 2|lambda_min|)`, so both
//! quantifiers share the minimizer of `lambda_min`; the search always minimizes it.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::entanglement::{min_eig_after_pt, negativity};
use super::optim::nelder_mead;
use crate::error::{Error, Result};
use crate::state::{DensityMatrix, Party, PureState, SubsystemPartition, DEGENERATE_WEIGHT};

pub const GRID_THETA: usize = 64;
pub const GRID_PHI: usize = 64;
pub const REFINE_STARTS: usize = 3;
pub const REFINE_ITERATIONS: usize = 500;
pub const REFINE_XTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantifier {
    /// Maximal negativity; positive certifies SLE.
    Negativity,
    /// Minimal `lambda_min` after partial transpose; positive certifies no SLE.
    MinEigenvalueAfterPt,
}

#[derive(Debug, Clone, Serialize)]
pub struct SleResult {
    pub value: f64,
    pub theta: f64,
    pub phi: f64,
    pub quantifier: Quantifier,
    pub localized_state: DensityMatrix,
}

fn pair_cut() -> SubsystemPartition {
    SubsystemPartition::bipartition(2, &[0]).expect("static partition")
}

/// Normalized post-projection state, or `None` for a degenerate branch.
pub fn localized_state(rho: &DensityMatrix, pair: &SubsystemPartition, theta: f64, phi: f64) -> Result<Option<DensityMatrix>> {
    let psi = PureState::qubit(theta, phi);
    let (state, weight) = rho.project_subsystem(&psi, pair, false)?;
    if !(weight >= DEGENERATE_WEIGHT) {
        return Ok(None);
    }
    state.normalize().map(Some)
}

/// Quantifier of the localized state at one projection angle.
pub fn evaluate(rho: &DensityMatrix, pair: &SubsystemPartition, quantifier: Quantifier, theta: f64, phi: f64) -> Result<Option<f64>> {
    let Some(state) = localized_state(rho, pair, theta, phi)? else {
        return Ok(None);
    };
    let v = match quantifier {
        Quantifier::Negativity => negativity(&state, &pair_cut())?,
        Quantifier::MinEigenvalueAfterPt => min_eig_after_pt(&state, &pair_cut())?,
    };
    Ok(Some(v))
}

/// Map `(theta, phi)` onto `[0, pi/2] x [0, 2 pi)` without changing the projector.
fn canonical(theta: f64, phi: f64) -> (f64, f64) {
    // cos/sin flip sign together under theta -> theta - pi: global phase only.
    let mut t = theta - PI * (theta / PI).round();
    let mut p = phi;
    if t < 0.0 {
        t = -t;
        p += PI;
    }
    (t, p.rem_euclid(TAU))
}

/// Optimize the quantifier over single-qubit projections of the `Measured` qubit.
pub fn sle_quantify(rho: &DensityMatrix, pair: &SubsystemPartition, quantifier: Quantifier) -> Result<SleResult> {
    if rho.n_qubits() != 3 || pair.n_qubits() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: rho.n_qubits(),
        });
    }
    if pair.qubits(Party::Measured).len() != 1 || pair.qubits(Party::Kept).len() != 2 {
        return Err(Error::InvalidPartition(
            "SLE needs two kept qubits and one measured qubit".into(),
        ));
    }

    let objective = |theta: f64, phi: f64| -> f64 {
        let Ok(Some(state)) = localized_state(rho, pair, theta, phi) else {
            return f64::INFINITY;
        };
        min_eig_after_pt(&state, &pair_cut()).unwrap_or(f64::INFINITY)
    };

    let d_theta = FRAC_PI_2 / (GRID_THETA - 1) as f64;
    let d_phi = TAU / GRID_PHI as f64;
    let grid: Vec<f64> = (0..GRID_THETA * GRID_PHI)
        .into_par_iter()
        .map(|k| objective((k / GRID_PHI) as f64 * d_theta, (k % GRID_PHI) as f64 * d_phi))
        .collect();
    let mut ranked: Vec<usize> = (0..grid.len()).filter(|&k| grid[k].is_finite()).collect();
    if ranked.is_empty() {
        return Err(Error::DegenerateProjection { weight: 0.0 });
    }
    ranked.sort_by(|&i, &j| grid[i].total_cmp(&grid[j]).then(i.cmp(&j)));

    let best_grid = ranked[0];
    let mut best = (
        (best_grid / GRID_PHI) as f64 * d_theta,
        (best_grid % GRID_PHI) as f64 * d_phi,
        grid[best_grid],
    );
    for &k in ranked.iter().take(REFINE_STARTS) {
        let start = [(k / GRID_PHI) as f64 * d_theta, (k % GRID_PHI) as f64 * d_phi];
        let r = nelder_mead(|[t, p]| objective(t, p), start, 0.5 * d_theta, REFINE_ITERATIONS, REFINE_XTOL);
        if r.value < best.2 {
            best = (r.point[0], r.point[1], r.value);
        }
    }

    let (theta, phi) = canonical(best.0, best.1);
    let localized_state = localized_state(rho, pair, theta, phi)?
        .ok_or(Error::DegenerateProjection { weight: 0.0 })?;
    let value = match quantifier {
        Quantifier::Negativity => negativity(&localized_state, &pair_cut())?,
        Quantifier::MinEigenvalueAfterPt => min_eig_after_pt(&localized_state, &pair_cut())?,
    };
    Ok(SleResult {
        value,
        theta,
        phi,
        quantifier,
        localized_state,
    })
}
