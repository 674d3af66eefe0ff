//! Command-line flags and their merge into a [`RunConfig`].

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{
    CommandKind, GridSpec, LocalizeSpec, OutputFormat, PropertyList, Protocol, RunConfig, SampleSpec,
};

#[derive(Debug, Parser)]
#[command(name = "superact", version, about = "Distillation and entanglement certification for noisy three-qubit states")]
pub struct Cli {
    /// JSON run configuration; flags given on the command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Bisection tolerance for threshold searches.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every certifier on one state.
    Certify(CertifyArgs),
    /// Distill two copies and report the output.
    Distill(DistillArgs),
    /// Fidelity curves, thresholds, or certifier values over a grid.
    Sweep(SweepArgs),
    /// Coincidence enumeration, preparation schedule, or sampled histograms.
    Coincidence(CoincidenceArgs),
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// `noisy-ghz:p`, `noisy-w:p`, `noise-model:p,q,r`, or a JSON file.
    pub inputs: Vec<String>,
    /// Qubit projected in the localizable-entanglement search.
    #[arg(long)]
    pub measured_qubit: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DistillArgs {
    /// One state (used for both copies) or two.
    pub inputs: Vec<String>,
    #[arg(long, value_enum)]
    pub protocol: Option<Protocol>,
    /// Measure one output qubit, e.g. `X:2` or `Z:0:1`.
    #[arg(long)]
    pub localize: Option<LocalizeSpec>,
    /// Certify the distilled state as well.
    #[arg(long)]
    pub recertify: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Fidelity curves on `start:stop:count`.
    #[arg(long)]
    pub curves: Option<GridSpec>,
    /// `all` or a comma-separated list such as `GME,SLE`.
    #[arg(long)]
    pub thresholds: Option<PropertyList>,
    /// Certifying quantities of these properties over `--grid`.
    #[arg(long)]
    pub values: Option<PropertyList>,
    #[arg(long)]
    pub grid: Option<GridSpec>,
}

#[derive(Debug, Args)]
pub struct CoincidenceArgs {
    /// State to sample (defaults to the pure GHZ state).
    pub inputs: Vec<String>,
    /// Preparation schedule for noise parameter `p`, given as `p=0.5` or `0.5`.
    #[arg(long, value_parser = parse_schedule)]
    pub schedule: Option<f64>,
    /// `setting=zzz,shots=1000,seed=7`.
    #[arg(long)]
    pub sample: Option<SampleSpec>,
}

fn parse_schedule(s: &str) -> Result<f64, String> {
    let v = s.strip_prefix("p=").unwrap_or(s);
    v.parse::<f64>().map_err(|e| format!("`{s}`: {e}"))
}

impl Cli {
    /// Overlay the flags onto `base` (the `--config` file or defaults).
    pub fn merge_into(self, mut cfg: RunConfig) -> RunConfig {
        if let Some(o) = self.output {
            cfg.output = Some(o);
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = self.tolerance {
            cfg.tolerance = Some(t);
        }
        let inputs = |cfg: &mut RunConfig, v: Vec<String>| {
            if !v.is_empty() {
                cfg.inputs = v;
            }
        };
        match self.command {
            None => {}
            Some(Command::Certify(a)) => {
                cfg.subcommand = Some(CommandKind::Certify);
                inputs(&mut cfg, a.inputs);
                if let Some(q) = a.measured_qubit {
                    cfg.measured_qubit = q;
                }
            }
            Some(Command::Distill(a)) => {
                cfg.subcommand = Some(CommandKind::Distill);
                inputs(&mut cfg, a.inputs);
                if let Some(p) = a.protocol {
                    cfg.protocol = p;
                }
                if a.localize.is_some() {
                    cfg.localize = a.localize;
                }
                cfg.recertify |= a.recertify;
            }
            Some(Command::Sweep(a)) => {
                cfg.subcommand = Some(CommandKind::Sweep);
                // A mode chosen on the command line replaces the configured one.
                if a.curves.is_some() || a.thresholds.is_some() || a.values.is_some() {
                    cfg.curves = a.curves;
                    cfg.thresholds = a.thresholds;
                    cfg.values = a.values;
                }
                if a.grid.is_some() {
                    cfg.grid = a.grid;
                }
            }
            Some(Command::Coincidence(a)) => {
                cfg.subcommand = Some(CommandKind::Coincidence);
                inputs(&mut cfg, a.inputs);
                if a.schedule.is_some() || a.sample.is_some() {
                    cfg.schedule = a.schedule;
                    cfg.sample = a.sample;
                }
            }
        }
        cfg
    }
}
