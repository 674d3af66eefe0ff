//! Threshold constants, fidelity curves and bisection on certifying quantities.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::certify::{
    gme_concurrence_x, min_eig_after_pt, ppt_mixer_witness, sle_quantify, Quantifier, SolverConfig,
};
use crate::distillation::{analytic_fidelity_after, analytic_localized_fidelity, distill_cnot, distill_tripartite};
use crate::error::{check_unit_interval, Error, Result};
use crate::report::{csv_table, real};
use crate::state::{bell_phi_plus, noise_model_state, noisy_ghz, noisy_w, DensityMatrix, SubsystemPartition};

/// Default bracket width for closed-form and SLE properties.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;
/// Default bracket width for SDP-backed properties.
pub const SDP_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Property {
    Gme,
    Sle,
    GmeAfterDistill,
    SleAfterDistill,
    WGme,
    WGmeAfterDistill,
    WSle,
}

impl Property {
    pub const ALL: [Property; 7] = [
        Property::Gme,
        Property::Sle,
        Property::GmeAfterDistill,
        Property::SleAfterDistill,
        Property::WGme,
        Property::WGmeAfterDistill,
        Property::WSle,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Property::Gme => "GME",
            Property::Sle => "SLE",
            Property::GmeAfterDistill => "GME-after-distill",
            Property::SleAfterDistill => "SLE-after-distill",
            Property::WGme => "W-GME",
            Property::WGmeAfterDistill => "W-GME-after-distill",
            Property::WSle => "W-SLE",
        }
    }

    pub fn uses_sdp(self) -> bool {
        matches!(self, Property::WGme | Property::WGmeAfterDistill)
    }

    pub fn default_tolerance(self) -> f64 {
        if self.uses_sdp() {
            SDP_TOLERANCE
        } else {
            DEFAULT_TOLERANCE
        }
    }

    /// A search interval containing exactly one crossing.
    pub fn default_range(self) -> (f64, f64) {
        match self {
            Property::Gme => (0.3, 0.6),
            Property::Sle => (0.2, 0.5),
            Property::GmeAfterDistill => (0.2, 0.4),
            Property::SleAfterDistill => (0.2, 0.35),
            Property::WGme => (0.4, 0.6),
            Property::WGmeAfterDistill => (0.4, 0.6),
            Property::WSle => (0.1, 0.5),
        }
    }

    /// Certifying quantity at `p`; positive exactly when the property is certified.
    pub fn quantity(self, p: f64) -> Result<f64> {
        check_unit_interval("p", p)?;
        let measure_last = || SubsystemPartition::kept(3, &[0, 1]);
        let sle = |rho: &DensityMatrix| -> Result<f64> {
            Ok(-sle_quantify(rho, &measure_last()?, Quantifier::MinEigenvalueAfterPt)?.value)
        };
        let sdp = |rho: &DensityMatrix| -> Result<f64> {
            Ok(-ppt_mixer_witness(rho, &SolverConfig::default())?.optimal_value)
        };
        match self {
            Property::Gme => gme_concurrence_x(&noisy_ghz(p)?),
            Property::Sle => sle(&noisy_ghz(p)?),
            Property::GmeAfterDistill => {
                let rho = noisy_ghz(p)?;
                gme_concurrence_x(&distill_tripartite(&rho, &rho)?.state)
            }
            Property::SleAfterDistill => {
                let rho = noisy_ghz(p)?;
                sle(&distill_tripartite(&rho, &rho)?.state)
            }
            Property::WGme => sdp(&noisy_w(p)?),
            Property::WGmeAfterDistill => {
                let rho = noisy_w(p)?;
                sdp(&distill_cnot(&rho, &rho)?.state)
            }
            Property::WSle => Ok(-min_eig_after_pt(
                &localized_noisy_w(p)?,
                &SubsystemPartition::bipartition(2, &[0])?,
            )?),
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Property::ALL
            .into_iter()
            .find(|p| p.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown property `{s}`")))
    }
}

impl From<Property> for String {
    fn from(p: Property) -> Self {
        p.label().to_string()
    }
}

impl TryFrom<String> for Property {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// `4p/(p+3) |Phi+><Phi+| + 3(1-p)/(4(p+3)) I`: noisy W after a computational-basis
/// measurement of one qubit (outcome 0) and a bit flip on the second remaining qubit.
pub fn localized_noisy_w(p: f64) -> Result<DensityMatrix> {
    check_unit_interval("p", p)?;
    let weight = 4.0 * p / (p + 3.0);
    DensityMatrix::mixture(&[
        (weight, &bell_phi_plus().projector()),
        (1.0 - weight, &DensityMatrix::maximally_mixed(2)),
    ])
}

/// Result of a sign-change bisection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bracket {
    /// Midpoint of the final bracket.
    pub crossing_p: f64,
    /// Width of the final bracket; the sign change lies within `crossing_p +- bracket_width / 2`.
    pub bracket_width: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub property: Property,
    pub crossing_p: f64,
    pub bracket_width: f64,
    pub evaluations: usize,
}

/// Bisect `[lo, hi]` on the predicate `f(p) > 0` down to a bracket of width `tolerance`.
pub fn bisect_sign<F>(mut f: F, range: (f64, f64), tolerance: f64) -> Result<Bracket>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = range;
    if !(lo < hi) || !(tolerance > 0.0) {
        return Err(Error::InvalidSetting(format!(
            "bisection needs lo < hi and tolerance > 0, got [{lo}, {hi}] and {tolerance}"
        )));
    }
    let lo_present = f(lo)? > 0.0;
    let hi_present = f(hi)? > 0.0;
    let mut evaluations = 2;
    if lo_present == hi_present {
        return Err(Error::NoSignChange { lo, hi });
    }
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        evaluations += 1;
        if (f(mid)? > 0.0) == lo_present {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Bracket {
        crossing_p: 0.5 * (lo + hi),
        bracket_width: hi - lo,
        evaluations,
    })
}

/// Locate the value of `p` where `property` switches on or off.
pub fn find_threshold(property: Property, p_range: (f64, f64), tolerance: f64) -> Result<ThresholdReport> {
    check_unit_interval("p_range.0", p_range.0)?;
    check_unit_interval("p_range.1", p_range.1)?;
    let b = bisect_sign(|p| property.quantity(p), p_range, tolerance)?;
    Ok(ThresholdReport {
        property,
        crossing_p: b.crossing_p,
        bracket_width: b.bracket_width,
        evaluations: b.evaluations,
    })
}

/// SLE boundary of the bit/phase-flip noise model at fixed `(q, r)`.
pub fn noise_model_sle_threshold(q: f64, r: f64, p_range: (f64, f64), tolerance: f64) -> Result<Bracket> {
    let pair = SubsystemPartition::kept(3, &[0, 1])?;
    bisect_sign(
        |p| {
            let rho = noise_model_state(p, q, r)?;
            Ok(-sle_quantify(&rho, &pair, Quantifier::MinEigenvalueAfterPt)?.value)
        },
        p_range,
        tolerance,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticConstant {
    pub label: &'static str,
    pub value: f64,
    pub expression: &'static str,
    /// Quoted from the literature rather than derived here.
    pub cited_only: bool,
}

pub fn analytic_constants() -> Vec<AnalyticConstant> {
    let c = |label, value, expression| AnalyticConstant {
        label,
        value,
        expression,
        cited_only: false,
    };
    vec![
        c("GME", 3.0 / 7.0, "3/7"),
        c("SLE", 1.0 / 3.0, "1/3"),
        c("GME-after-distill", (4.0 * 3f64.sqrt() - 3.0) / 13.0, "(4*sqrt(3)-3)/13"),
        c("SLE-after-distill", (2.0 * 2f64.sqrt() - 1.0) / 7.0, "(2*sqrt(2)-1)/7"),
        c("W-SLE", 3.0 / 11.0, "3/11"),
        AnalyticConstant {
            label: "GME-infinite-copy",
            value: 0.2,
            expression: "0.2",
            cited_only: true,
        },
    ]
}

pub fn lookup(label: &str) -> Option<AnalyticConstant> {
    analytic_constants().into_iter().find(|c| c.label == label)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityRow {
    pub p: f64,
    /// `(1 + 7p) / 8`
    pub f_initial: f64,
    /// GHZ fidelity after distillation.
    pub f1: f64,
    /// Bell fidelity after distillation and localization.
    pub f2: f64,
}

pub fn fidelity_curves(p_grid: &[f64]) -> Result<Vec<FidelityRow>> {
    p_grid
        .iter()
        .map(|&p| {
            check_unit_interval("p", p)?;
            Ok(FidelityRow {
                p,
                f_initial: (1.0 + 7.0 * p) / 8.0,
                f1: analytic_fidelity_after(p)?,
                f2: analytic_localized_fidelity(p)?,
            })
        })
        .collect()
}

/// `count` evenly spaced points from `start` to `stop` inclusive; a single point is `start`.
pub fn linear_grid(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidSetting("grid count must be at least 1".into()));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count)
        .map(|k| if k == count - 1 { stop } else { start + k as f64 * step })
        .collect())
}

pub fn thresholds_csv(reports: &[ThresholdReport]) -> Result<String> {
    csv_table(
        &["property", "crossing_p", "bracket_width", "evaluations"],
        reports.iter().map(|r| {
            vec![
                r.property.to_string(),
                real(r.crossing_p),
                real(r.bracket_width),
                r.evaluations.to_string(),
            ]
        }),
    )
}

pub fn fidelity_curves_csv(rows: &[FidelityRow]) -> Result<String> {
    csv_table(
        &["p", "F_initial", "F1", "F2"],
        rows.iter().map(|r| vec![real(r.p), real(r.f_initial), real(r.f1), real(r.f2)]),
    )
}
