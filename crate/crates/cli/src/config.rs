//! Run configuration shared by the command line and `--config` JSON files.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, ensure, Context};
use serde::{Deserialize, Serialize};
use superact_core::certify::SolverConfig;
use superact_core::coincidence::PauliSetting;
use superact_core::distillation::LocalizationBasis;
use superact_core::thresholds::Property;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Certify,
    Distill,
    Sweep,
    Coincidence,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    /// Polarizing-beam-splitter parity check on GHZ-type inputs.
    #[default]
    Pbs,
    /// Bilateral CNOT on W-type inputs.
    Cnot,
}

/// `start:stop:count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl FromStr for GridSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        ensure!(parts.len() == 3, "grid `{s}` must look like start:stop:count");
        let start: f64 = parts[0].trim().parse().with_context(|| format!("grid start `{}`", parts[0]))?;
        let stop: f64 = parts[1].trim().parse().with_context(|| format!("grid stop `{}`", parts[1]))?;
        let count: usize = parts[2].trim().parse().with_context(|| format!("grid count `{}`", parts[2]))?;
        let grid = Self { start, stop, count };
        grid.validate()?;
        Ok(grid)
    }
}

impl GridSpec {
    pub fn validate(&self) -> anyhow::Result<()> {
        ensure!(self.count >= 1, "grid count must be at least 1");
        ensure!(
            (0.0..=1.0).contains(&self.start) && (0.0..=1.0).contains(&self.stop),
            "grid endpoints must lie in [0, 1]"
        );
        Ok(())
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

impl From<GridSpec> for String {
    fn from(g: GridSpec) -> Self {
        g.to_string()
    }
}

impl TryFrom<String> for GridSpec {
    type Error = anyhow::Error;

    fn try_from(s: String) -> anyhow::Result<Self> {
        s.parse()
    }
}

/// `BASIS:QUBIT[:OUTCOME]`, e.g. `X:2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct LocalizeSpec {
    pub basis: LocalizationBasis,
    pub qubit: usize,
    pub outcome: usize,
}

impl FromStr for LocalizeSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        ensure!(
            parts.len() == 2 || parts.len() == 3,
            "localization `{s}` must look like BASIS:QUBIT[:OUTCOME]"
        );
        let basis = match parts[0].to_ascii_uppercase().as_str() {
            "X" => LocalizationBasis::X,
            "Z" => LocalizationBasis::Computational,
            other => bail!("unknown localization basis `{other}` (expected X or Z)"),
        };
        let qubit: usize = parts[1].parse().with_context(|| format!("qubit `{}`", parts[1]))?;
        let outcome: usize = match parts.get(2) {
            Some(o) => o.parse().with_context(|| format!("outcome `{o}`"))?,
            None => 0,
        };
        ensure!(qubit < 3, "localized qubit must be 0, 1 or 2");
        ensure!(outcome < 2, "outcome must be 0 or 1");
        Ok(Self { basis, qubit, outcome })
    }
}

impl fmt::Display for LocalizeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = match self.basis {
            LocalizationBasis::X => "X",
            LocalizationBasis::Computational => "Z",
        };
        write!(f, "{b}:{}:{}", self.qubit, self.outcome)
    }
}

impl From<LocalizeSpec> for String {
    fn from(l: LocalizeSpec) -> Self {
        l.to_string()
    }
}

impl TryFrom<String> for LocalizeSpec {
    type Error = anyhow::Error;

    fn try_from(s: String) -> anyhow::Result<Self> {
        s.parse()
    }
}

/// Finite-shot measurement request: `setting=zzz,shots=1000,seed=7`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub setting: String,
    pub shots: u64,
    /// Falls back to the run seed.
    #[serde(default)]
    pub seed: Option<u64>,
}

impl FromStr for SampleSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let (mut setting, mut shots, mut seed) = (None, None, None);
        for item in s.split([',', ' ']).filter(|t| !t.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .with_context(|| format!("sample item `{item}` must be key=value"))?;
            match key {
                "setting" => setting = Some(value.to_string()),
                "shots" => shots = Some(value.parse().with_context(|| format!("shots `{value}`"))?),
                "seed" => seed = Some(value.parse().with_context(|| format!("seed `{value}`"))?),
                other => bail!("unknown sample key `{other}`"),
            }
        }
        let spec = Self {
            setting: setting.context("sample needs setting=...")?,
            shots: shots.context("sample needs shots=...")?,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl SampleSpec {
    pub fn validate(&self) -> anyhow::Result<()> {
        self.setting.parse::<PauliSetting>()?;
        ensure!(self.shots > 0, "shots must be positive");
        Ok(())
    }
}

/// Which thresholds a sweep locates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct PropertyList(pub Vec<Property>);

impl FromStr for PropertyList {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        if s.trim().eq_ignore_ascii_case("all") {
            return Ok(Self(Property::ALL.to_vec()));
        }
        let props = s
            .split(',')
            .map(|t| t.trim().parse::<Property>())
            .collect::<Result<Vec<_>, _>>()?;
        ensure!(!props.is_empty(), "empty property list");
        Ok(Self(props))
    }
}

impl From<PropertyList> for String {
    fn from(l: PropertyList) -> Self {
        l.0.iter().map(|p| p.label()).collect::<Vec<_>>().join(",")
    }
}

impl TryFrom<String> for PropertyList {
    type Error = anyhow::Error;

    fn try_from(s: String) -> anyhow::Result<Self> {
        s.parse()
    }
}

/// Everything a run needs. Command-line flags override values read with `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: Option<CommandKind>,
    /// State specs (`noisy-ghz:p`, `noisy-w:p`, `noise-model:p,q,r`) or JSON file paths.
    pub inputs: Vec<String>,
    /// Qubit projected by the localizable-entanglement search.
    pub measured_qubit: usize,
    pub protocol: Protocol,
    pub localize: Option<LocalizeSpec>,
    /// Re-run the certifiers on the distilled state.
    pub recertify: bool,
    pub curves: Option<GridSpec>,
    pub thresholds: Option<PropertyList>,
    /// Certifying quantities of these properties over `grid`.
    pub values: Option<PropertyList>,
    pub grid: Option<GridSpec>,
    /// Bisection tolerance; each property's default when absent.
    pub tolerance: Option<f64>,
    pub schedule: Option<f64>,
    pub sample: Option<SampleSpec>,
    pub seed: u64,
    pub solver: SolverConfig,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            subcommand: None,
            inputs: Vec::new(),
            measured_qubit: 2,
            protocol: Protocol::default(),
            localize: None,
            recertify: false,
            curves: None,
            thresholds: None,
            values: None,
            grid: None,
            tolerance: None,
            schedule: None,
            sample: None,
            seed: 0,
            solver: SolverConfig::default(),
            output: None,
            format: OutputFormat::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json_str(s: &str) -> anyhow::Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Checks that need no state construction.
    pub fn validate(&self) -> anyhow::Result<()> {
        let command = self.subcommand.context("no subcommand given")?;
        if let Some(t) = self.tolerance {
            ensure!(t > 0.0 && t.is_finite(), "tolerance must be positive");
        }
        ensure!(
            self.solver.feasibility_tolerance > 0.0
                && self.solver.stagnation_tolerance > 0.0
                && self.solver.sign_margin >= 0.0
                && self.solver.step > 0.0,
            "solver tolerances must be positive"
        );
        for g in [&self.curves, &self.grid].into_iter().flatten() {
            g.validate()?;
        }
        if let Some(s) = &self.sample {
            s.validate()?;
        }
        match command {
            CommandKind::Certify => {
                ensure!(self.inputs.len() == 1, "certify takes exactly one input state");
                ensure!(self.measured_qubit < 3, "measured qubit must be 0, 1 or 2");
            }
            CommandKind::Distill => {
                ensure!(
                    (1..=2).contains(&self.inputs.len()),
                    "distill takes one input (used twice) or two inputs"
                );
            }
            CommandKind::Sweep => {
                let modes = [self.curves.is_some(), self.thresholds.is_some(), self.values.is_some()];
                ensure!(
                    modes.iter().filter(|&&m| m).count() == 1,
                    "sweep needs exactly one of curves, thresholds or values"
                );
                if self.values.is_some() {
                    ensure!(self.grid.is_some(), "values sweep needs a grid");
                }
            }
            CommandKind::Coincidence => {
                ensure!(
                    !(self.schedule.is_some() && self.sample.is_some()),
                    "choose either schedule or sample"
                );
                if let Some(p) = self.schedule {
                    ensure!((0.0..=1.0).contains(&p), "schedule p must lie in [0, 1]");
                }
                ensure!(self.inputs.len() <= 1, "coincidence samples at most one input state");
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: GridSpec = "0:1:101".parse().unwrap();
        assert_eq!((g.start, g.stop, g.count), (0.0, 1.0, 101));
        assert!("0:1:0".parse::<GridSpec>().is_err());
        assert!("0:1".parse::<GridSpec>().is_err());
        assert!("0:2:5".parse::<GridSpec>().is_err());
    }

    #[test]
    fn localize_parsing() {
        let l: LocalizeSpec = "X:2".parse().unwrap();
        assert_eq!((l.basis, l.qubit, l.outcome), (LocalizationBasis::X, 2, 0));
        assert_eq!(l.to_string().parse::<LocalizeSpec>().unwrap(), l);
        assert!("Y:2".parse::<LocalizeSpec>().is_err());
        assert!("X:3".parse::<LocalizeSpec>().is_err());
    }

    #[test]
    fn sample_parsing() {
        let s: SampleSpec = "setting=zzz,shots=1000,seed=7".parse().unwrap();
        assert_eq!(s.setting, "zzz");
        assert_eq!((s.shots, s.seed), (1000, Some(7)));
        assert!("setting=zqz,shots=10".parse::<SampleSpec>().is_err());
        assert!("setting=zzz,shots=0".parse::<SampleSpec>().is_err());
        assert!("setting=zzz".parse::<SampleSpec>().is_err());
    }

    #[test]
    fn properties() {
        assert_eq!("all".parse::<PropertyList>().unwrap().0.len(), 7);
        let l: PropertyList = "gme,SLE".parse().unwrap();
        assert_eq!(l.0, vec![Property::Gme, Property::Sle]);
        assert!("GMX".parse::<PropertyList>().is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = RunConfig {
            subcommand: Some(CommandKind::Sweep),
            curves: Some("0:1:11".parse().unwrap()),
            sample: Some("setting=xx,shots=5".parse().unwrap()),
            ..RunConfig::default()
        };
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_json_str(&text).unwrap(), cfg);
        assert!(RunConfig::from_json_str(r#"{"bogus": 1}"#).is_err());
        let partial = RunConfig::from_json_str(r#"{"subcommand": "certify", "inputs": ["noisy-ghz:0.5"]}"#).unwrap();
        assert_eq!(partial.measured_qubit, 2);
        partial.validate().unwrap();
    }

    #[test]
    fn validation() {
        let mut cfg = RunConfig {
            subcommand: Some(CommandKind::Sweep),
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());
        cfg.curves = Some("0:1:3".parse().unwrap());
        cfg.validate().unwrap();
        cfg.tolerance = Some(0.0);
        assert!(cfg.validate().is_err());
        cfg.tolerance = None;
        cfg.values = Some("GME".parse().unwrap());
        assert!(cfg.validate().is_err());
        assert!(RunConfig::default().validate().is_err());
    }
}
