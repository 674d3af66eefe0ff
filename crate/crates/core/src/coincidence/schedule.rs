//! Mixing schedule that prepares a noisy GHZ state from heralded components.

use serde::Serialize;

use crate::error::{check_unit_interval, Error, Result};
use crate::report::{csv_table, real};
use crate::state::{make_ghz, DensityMatrix, Sign};

#[derive(Debug, Clone, Serialize)]
pub struct PreparationRow {
    pub label: String,
    #[serde(skip)]
    pub component: DensityMatrix,
    /// Herald polarizer inserted.
    pub m1: bool,
    pub m2: bool,
    pub m3: bool,
    pub probability: f64,
    /// Fraction of trials heralded in this setting: the polarizer passes half of them.
    pub herald_efficiency: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PreparationSchedule {
    pub p: f64,
    pub p_prime: f64,
    pub rows: Vec<PreparationRow>,
}

/// `p' = 2p / (1 + p)`.
pub fn p_prime(p: f64) -> f64 {
    2.0 * p / (1.0 + p)
}

/// `(|G_k+><G_k+| + |G_k-><G_k-|) / 2`.
fn dephased_component(k: usize) -> Result<DensityMatrix> {
    DensityMatrix::mixture(&[
        (0.5, &make_ghz(k, Sign::Plus)?.projector()),
        (0.5, &make_ghz(k, Sign::Minus)?.projector()),
    ])
}

/// Five settings: the GHZ component with probability `p'` and the four dephased
/// components with `(1 - p') / 4` each.
pub fn preparation_schedule(p: f64) -> Result<PreparationSchedule> {
    check_unit_interval("p", p)?;
    let pp = p_prime(p);
    let rest = (1.0 - pp) / 4.0;
    let mut rows = vec![PreparationRow {
        label: "GHZ3".into(),
        component: make_ghz(0, Sign::Plus)?.projector(),
        m1: true,
        m2: false,
        m3: false,
        probability: pp,
        herald_efficiency: 0.5,
    }];
    for (k, (m2, m3)) in [(false, false), (true, false), (false, true), (true, true)].into_iter().enumerate() {
        rows.push(PreparationRow {
            label: format!("rho_G{k}"),
            component: dephased_component(k)?,
            m1: false,
            m2,
            m3,
            probability: rest,
            herald_efficiency: 1.0,
        });
    }
    Ok(PreparationSchedule { p, p_prime: pp, rows })
}

impl PreparationSchedule {
    /// Rows with nonzero probability.
    pub fn active_rows(&self) -> impl Iterator<Item = &PreparationRow> {
        self.rows.iter().filter(|r| r.probability > 0.0)
    }

    /// Heralded state: components weighted by `probability * herald_efficiency`.
    pub fn mixture(&self) -> Result<DensityMatrix> {
        let total = self.heralded_fraction();
        let terms: Vec<(f64, &DensityMatrix)> = self
            .rows
            .iter()
            .map(|r| (r.probability * r.herald_efficiency / total, &r.component))
            .collect();
        DensityMatrix::mixture(&terms)
    }

    /// `sum probability * herald_efficiency = 1 / (1 + p)`.
    pub fn heralded_fraction(&self) -> f64 {
        self.rows.iter().map(|r| r.probability * r.herald_efficiency).sum()
    }

    pub fn to_csv(&self) -> Result<String> {
        let on = |b: bool| if b { "in" } else { "out" }.to_string();
        csv_table(
            &["component", "M1", "M2", "M3", "probability", "herald_efficiency"],
            self.rows.iter().map(|r| {
                vec![
                    r.label.clone(),
                    on(r.m1),
                    on(r.m2),
                    on(r.m3),
                    real(r.probability),
                    real(r.herald_efficiency),
                ]
            }),
        )
    }
}

/// `g^2 / (2 (1 + p))` for a per-trial pair generation probability `g`.
pub fn generation_probability(p: f64, g: f64) -> Result<f64> {
    check_unit_interval("p", p)?;
    if !(g >= 0.0 && g.is_finite()) {
        return Err(Error::ParameterOutOfRange {
            name: "g",
            value: g,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    Ok(g * g / (2.0 * (1.0 + p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius_norm;
    use crate::state::noisy_ghz;
    use approx::assert_abs_diff_eq;

    #[test]
    fn half_noise_example() {
        let s = preparation_schedule(0.5).unwrap();
        assert_abs_diff_eq!(s.p_prime, 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(s.rows.len(), 5);
        for r in &s.rows[1..] {
            assert_abs_diff_eq!(r.probability, 1.0 / 12.0, epsilon = 1e-15);
        }
        let settings: Vec<_> = s.rows.iter().map(|r| (r.m1, r.m2, r.m3)).collect();
        assert_eq!(
            settings,
            vec![
                (true, false, false),
                (false, false, false),
                (false, true, false),
                (false, false, true),
                (false, true, true)
            ]
        );
    }

    #[test]
    fn pure_limit() {
        let s = preparation_schedule(1.0).unwrap();
        let active: Vec<_> = s.active_rows().collect();
        assert_eq!(active.len(), 1);
        assert_eq!(active[0].label, "GHZ3");
        assert_eq!(active[0].probability, 1.0);
    }

    #[test]
    fn probabilities_sum_to_one_and_mixture_matches() {
        for k in 0..=20 {
            let p = k as f64 / 20.0;
            let s = preparation_schedule(p).unwrap();
            assert_abs_diff_eq!(s.rows.iter().map(|r| r.probability).sum::<f64>(), 1.0, epsilon = 1e-15);
            let mixed = s.mixture().unwrap();
            let target = noisy_ghz(p).unwrap();
            for (a, b) in mixed.matrix().iter().zip(target.matrix().iter()) {
                assert!((a - b).norm() <= 1e-14, "p={p}");
            }
            assert_abs_diff_eq!(s.heralded_fraction(), 1.0 / (1.0 + p), epsilon = 1e-15);
        }
    }

    #[test]
    fn unweighted_mixture_is_noisy_ghz_at_p_prime() {
        // Ignoring the herald efficiency gives the state at p' instead of p.
        let s = preparation_schedule(0.5).unwrap();
        let terms: Vec<_> = s.rows.iter().map(|r| (r.probability, &r.component)).collect();
        let plain = DensityMatrix::mixture(&terms).unwrap();
        let at_prime = noisy_ghz(2.0 / 3.0).unwrap();
        assert!(frobenius_norm(&(plain.matrix() - at_prime.matrix())) < 1e-14);
    }

    #[test]
    fn dephased_components_average_to_identity() {
        let comps: Vec<_> = (0..4).map(|k| dephased_component(k).unwrap()).collect();
        let terms: Vec<_> = comps.iter().map(|c| (0.25, c)).collect();
        let avg = DensityMatrix::mixture(&terms).unwrap();
        assert!(frobenius_norm(&(avg.matrix() - DensityMatrix::maximally_mixed(3).matrix())) < 1e-15);
    }

    #[test]
    fn generation_probability_values() {
        let g = 0.1;
        assert_abs_diff_eq!(generation_probability(1.0, g).unwrap(), g * g / 4.0, epsilon = 1e-18);
        assert_abs_diff_eq!(generation_probability(0.0, g).unwrap(), g * g / 2.0, epsilon = 1e-18);
        let mut last = f64::INFINITY;
        for k in 0..=10 {
            let v = generation_probability(k as f64 / 10.0, g).unwrap();
            assert!(v < last);
            last = v;
        }
        // Equals (g^2 / 2) times the heralded fraction of the schedule.
        let s = preparation_schedule(0.3).unwrap();
        assert_abs_diff_eq!(generation_probability(0.3, g).unwrap(), g * g / 2.0 * s.heralded_fraction(), epsilon = 1e-18);
        assert!(generation_probability(1.5, g).is_err());
        assert!(generation_probability(0.5, -1.0).is_err());
    }

    #[test]
    fn schedule_csv() {
        let csv = preparation_schedule(0.5).unwrap().to_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("GHZ3,in,out,out,6.6666666666666663e-1,"));
    }
}
