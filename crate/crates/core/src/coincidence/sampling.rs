//! Finite-shot Pauli measurements and fidelity estimation from the sampled data.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::certify::{fidelity_from_settings, FidelityTarget, Setting};
use crate::error::{Error, Result};
use crate::state::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    /// Unitary taking the `+1` eigenvector to `|0>` and `-1` to `|1>`.
    fn rotation(self) -> [[Complex64; 2]; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let r = |x: f64| Complex64::new(x * h, 0.0);
        let i = Complex64::new(0.0, h);
        match self {
            Pauli::X => [[r(1.0), r(1.0)], [r(1.0), r(-1.0)]],
            Pauli::Y => [[r(1.0), -i], [r(1.0), i]],
            Pauli::Z => [[r(1.0 / h), r(0.0)], [r(0.0), r(1.0 / h)]],
        }
    }
}

/// One Pauli observable per qubit, written like `xzy`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliSetting(Vec<Pauli>);

impl PauliSetting {
    pub fn new(paulis: Vec<Pauli>) -> Result<Self> {
        if paulis.is_empty() {
            return Err(Error::InvalidSetting("empty Pauli setting".into()));
        }
        Ok(Self(paulis))
    }

    pub fn n_qubits(&self) -> usize {
        self.0.len()
    }

    pub fn paulis(&self) -> &[Pauli] {
        &self.0
    }
}

impl fmt::Display for PauliSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            f.write_str(match p {
                Pauli::X => "x",
                Pauli::Y => "y",
                Pauli::Z => "z",
            })?;
        }
        Ok(())
    }
}

impl FromStr for PauliSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let paulis = s
            .chars()
            .map(|c| match c.to_ascii_lowercase() {
                'x' => Ok(Pauli::X),
                'y' => Ok(Pauli::Y),
                'z' => Ok(Pauli::Z),
                _ => Err(Error::InvalidSetting(format!("`{s}`: expected only x, y, z"))),
            })
            .collect::<Result<_>>()?;
        Self::new(paulis)
    }
}

impl Serialize for PauliSetting {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Sampled outcome counts; outcome bit `0` is the `+1` eigenvalue.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Histogram {
    pub setting: PauliSetting,
    pub shots: u64,
    pub seed: u64,
    pub histogram: BTreeMap<String, u64>,
}

impl Histogram {
    pub fn frequency(&self, outcome: &str) -> f64 {
        self.histogram.get(outcome).copied().unwrap_or(0) as f64 / self.shots as f64
    }

    /// Sample mean of the product observable.
    pub fn expectation(&self) -> f64 {
        let signed: i64 = self
            .histogram
            .iter()
            .map(|(k, &n)| {
                let ones = k.bytes().filter(|&b| b == b'1').count();
                if ones % 2 == 0 {
                    n as i64
                } else {
                    -(n as i64)
                }
            })
            .sum();
        signed as f64 / self.shots as f64
    }
}

fn outcome_label(index: usize, n: usize) -> String {
    format!("{index:0n$b}")
}

/// Exact outcome distribution of `setting` on `rho`, indexed like basis states.
pub fn born_probabilities(rho: &DensityMatrix, setting: &PauliSetting) -> Result<Vec<f64>> {
    if setting.n_qubits() != rho.n_qubits() {
        return Err(Error::InvalidSetting(format!(
            "setting `{setting}` has {} qubits, state has {}",
            setting.n_qubits(),
            rho.n_qubits()
        )));
    }
    let mut rotated = rho.clone();
    for (q, p) in setting.paulis().iter().enumerate() {
        if *p != Pauli::Z {
            rotated = rotated.apply_local(&p.rotation(), q)?;
        }
    }
    let diag: Vec<f64> = (0..rotated.dim()).map(|i| rotated.entry(i, i).re.max(0.0)).collect();
    let total: f64 = diag.iter().sum();
    Ok(diag.into_iter().map(|x| x / total).collect())
}

/// Draw `shots` outcomes of `setting` with a ChaCha20 stream seeded by `seed`.
pub fn sample_counts(rho: &DensityMatrix, setting: &PauliSetting, shots: u64, seed: u64) -> Result<Histogram> {
    if shots == 0 {
        return Err(Error::InvalidSetting("shots must be positive".into()));
    }
    let probs = born_probabilities(rho, setting)?;
    let dist = WeightedIndex::new(&probs).map_err(|e| Error::InvalidState(e.to_string()))?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        counts[dist.sample(&mut rng)] += 1;
    }
    let n = setting.n_qubits();
    Ok(Histogram {
        setting: setting.clone(),
        shots,
        seed,
        histogram: counts
            .into_iter()
            .enumerate()
            .map(|(i, c)| (outcome_label(i, n), c))
            .collect(),
    })
}

/// Fidelity estimated from sampled Pauli data, with its one-sigma statistical error.
#[derive(Debug, Clone, Serialize)]
pub struct FidelityEstimate {
    pub target: FidelityTarget,
    pub fidelity: f64,
    pub std_error: f64,
    pub expectations: BTreeMap<Setting, f64>,
    pub histograms: Vec<Histogram>,
}

/// Decompose each required setting into Pauli product settings, sample each with
/// `shots` shots (setting `i` uses seed `seed + i`), and combine.
///
/// The error propagates per-setting binomial variances `(1 - <P>^2) / shots` through
/// the linear combination, and `q (1 - q) / shots` for the population term.
pub fn estimate_fidelity(rho: &DensityMatrix, target: FidelityTarget, shots: u64, seed: u64) -> Result<FidelityEstimate> {
    let n = target.n_qubits();
    if rho.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rho.n_qubits(),
        });
    }
    // (Pauli setting, coefficient in the fidelity of <P>).
    let mut terms: Vec<(PauliSetting, f64)> = Vec::new();
    match target {
        FidelityTarget::Ghz3 => {
            for mask in 0..8usize {
                let paulis: Vec<Pauli> = (0..3)
                    .map(|q| if (mask >> (2 - q)) & 1 == 1 { Pauli::Y } else { Pauli::X })
                    .collect();
                let ys = mask.count_ones() as i32;
                let coef: f64 = (0..3u8)
                    .map(|k| {
                        let a = f64::from(k) * std::f64::consts::PI / 3.0;
                        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                        sign * a.cos().powi(3 - ys) * a.sin().powi(ys)
                    })
                    .sum::<f64>()
                    / 6.0;
                terms.push((PauliSetting::new(paulis)?, coef));
            }
        }
        FidelityTarget::Epr => {
            terms.push(("xx".parse()?, 0.25));
            terms.push(("yy".parse()?, -0.25));
        }
    }

    let population_setting = PauliSetting::new(vec![Pauli::Z; n])?;
    let pop_hist = sample_counts(rho, &population_setting, shots, seed)?;
    let q = pop_hist.frequency(&"0".repeat(n)) + pop_hist.frequency(&"1".repeat(n));
    let shots_f = shots as f64;
    let mut variance = 0.25 * q * (1.0 - q) / shots_f;
    let mut histograms = vec![pop_hist];
    let mut pauli_means = Vec::with_capacity(terms.len());
    for (i, (setting, coef)) in terms.iter().enumerate() {
        let h = sample_counts(rho, setting, shots, seed.wrapping_add(1 + i as u64))?;
        let mean = h.expectation();
        variance += coef * coef * (1.0 - mean * mean) / shots_f;
        pauli_means.push(mean);
        histograms.push(h);
    }

    let mut expectations = BTreeMap::new();
    expectations.insert(Setting::Population, q);
    match target {
        FidelityTarget::Ghz3 => {
            for k in 0..3u8 {
                let a = f64::from(k) * std::f64::consts::PI / 3.0;
                let value: f64 = terms
                    .iter()
                    .zip(&pauli_means)
                    .map(|((s, _), m)| {
                        let ys = s.paulis().iter().filter(|&&p| p == Pauli::Y).count() as i32;
                        a.cos().powi(3 - ys) * a.sin().powi(ys) * m
                    })
                    .sum();
                expectations.insert(Setting::M(k), value);
            }
        }
        FidelityTarget::Epr => {
            expectations.insert(Setting::XX, pauli_means[0]);
            expectations.insert(Setting::YY, pauli_means[1]);
        }
    }
    Ok(FidelityEstimate {
        target,
        fidelity: fidelity_from_settings(&expectations, target)?,
        std_error: variance.sqrt(),
        expectations,
        histograms,
    })
}
