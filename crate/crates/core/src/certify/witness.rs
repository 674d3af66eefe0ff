//! Fidelity-based witnesses and fidelity estimation from local measurement settings.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hs_inner, CMatrix};
use crate::state::{gates, make_ghz, w_state, DensityMatrix, Sign};

/// `tr(W rho)` for `W = I/2 - |GHZ><GHZ|`, i.e. `1/2 - F`.
pub fn ghz_witness_expectation(rho: &DensityMatrix) -> Result<f64> {
    let f = rho.fidelity_with_pure(&make_ghz(0, Sign::Plus)?)?;
    Ok(0.5 - f)
}

/// `tr(W rho)` for `W = 2I/3 - |W><W|`.
pub fn w_witness_expectation(rho: &DensityMatrix) -> Result<f64> {
    let f = rho.fidelity_with_pure(&w_state())?;
    Ok(2.0 / 3.0 - f)
}

/// A product measurement setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Setting {
    /// Projector onto the all-equal computational basis states (`|0..0>`, `|1..1>`).
    Population,
    /// `M_k` on every qubit, `M_k = cos(k pi/3) X + sin(k pi/3) Y`, `k in 0..3`.
    M(u8),
    XX,
    YY,
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Setting::Population => write!(f, "pop"),
            Setting::M(k) => write!(f, "M{k}"),
            Setting::XX => write!(f, "XX"),
            Setting::YY => write!(f, "YY"),
        }
    }
}

impl FromStr for Setting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pop" => Ok(Setting::Population),
            "M0" => Ok(Setting::M(0)),
            "M1" => Ok(Setting::M(1)),
            "M2" => Ok(Setting::M(2)),
            "XX" => Ok(Setting::XX),
            "YY" => Ok(Setting::YY),
            other => Err(Error::InvalidSetting(other.to_string())),
        }
    }
}

impl From<Setting> for String {
    fn from(s: Setting) -> Self {
        s.to_string()
    }
}

impl TryFrom<String> for Setting {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Target state of [`fidelity_from_settings`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FidelityTarget {
    Ghz3,
    Epr,
}

impl FidelityTarget {
    pub fn n_qubits(self) -> usize {
        match self {
            FidelityTarget::Ghz3 => 3,
            FidelityTarget::Epr => 2,
        }
    }

    pub fn required_settings(self) -> Vec<Setting> {
        match self {
            FidelityTarget::Ghz3 => vec![Setting::Population, Setting::M(0), Setting::M(1), Setting::M(2)],
            FidelityTarget::Epr => vec![Setting::Population, Setting::XX, Setting::YY],
        }
    }
}

/// `cos(k pi/3) X + sin(k pi/3) Y`.
pub fn m_operator(k: u8) -> [[Complex64; 2]; 2] {
    let angle = f64::from(k) * std::f64::consts::PI / 3.0;
    let e = Complex64::from_polar(1.0, angle);
    let zero = Complex64::new(0.0, 0.0);
    [[zero, e.conj()], [e, zero]]
}

fn kron_power(op: &[[Complex64; 2]; 2], n: usize) -> CMatrix {
    let single = CMatrix::from_fn(2, 2, |i, j| op[i][j]);
    (1..n).fold(single.clone(), |acc, _| acc.kronecker(&single))
}

/// Observable measured by `setting` on `n_qubits` qubits.
pub fn setting_operator(setting: Setting, n_qubits: usize) -> Result<CMatrix> {
    let d = 1usize << n_qubits;
    Ok(match setting {
        Setting::Population => {
            let mut m = CMatrix::zeros(d, d);
            m[(0, 0)] = Complex64::new(1.0, 0.0);
            m[(d - 1, d - 1)] = Complex64::new(1.0, 0.0);
            m
        }
        Setting::M(k) if k < 3 => kron_power(&m_operator(k), n_qubits),
        Setting::M(k) => return Err(Error::InvalidSetting(format!("M{k}"))),
        Setting::XX => kron_power(&gates::PAULI_X, n_qubits),
        Setting::YY => kron_power(&gates::PAULI_Y, n_qubits),
    })
}

/// Exact `<setting>` on `rho`.
pub fn exact_expectation(rho: &DensityMatrix, setting: Setting) -> Result<f64> {
    Ok(hs_inner(&setting_operator(setting, rho.n_qubits())?, rho.matrix()))
}

/// Fidelity with the target from measured expectation values.
///
/// GHZ: `F = <pop>/2 + (1/6) sum_k (-1)^k <M_k^{x3}>`.
/// EPR: `F = <pop>/2 + (<XX> - <YY>)/4`.
pub fn fidelity_from_settings(expectations: &BTreeMap<Setting, f64>, target: FidelityTarget) -> Result<f64> {
    let get = |s: Setting| {
        expectations
            .get(&s)
            .copied()
            .ok_or_else(|| Error::MissingSetting(s.to_string()))
    };
    let pop = get(Setting::Population)?;
    Ok(match target {
        FidelityTarget::Ghz3 => {
            let m = get(Setting::M(0))? - get(Setting::M(1))? + get(Setting::M(2))?;
            0.5 * pop + m / 6.0
        }
        FidelityTarget::Epr => 0.5 * pop + 0.25 * (get(Setting::XX)? - get(Setting::YY)?),
    })
}
