//! Subcommand implementations. Each returns the rendered output; nothing touches the
//! filesystem until the whole result exists.

use anyhow::{ensure, Context};
use rayon::prelude::*;
use serde::Serialize;
use superact_core::certify::{
    ghz_witness_expectation, gme_concurrence_x, ppt_mixer_witness, sle_quantify, w_witness_expectation,
    CertifiedSign, Quantifier, SleResult, WitnessResult,
};
use superact_core::coincidence::{enumerate_same_order_events, preparation_schedule, sample_counts, PauliSetting};
use superact_core::distillation::{distill_cnot, distill_tripartite, localize};
use superact_core::report::{csv_table, real};
use superact_core::state::{bell_phi_plus, make_ghz, w_state};
use superact_core::thresholds::{
    find_threshold, fidelity_curves, fidelity_curves_csv, linear_grid, thresholds_csv, Property, ThresholdReport,
};
use superact_core::{DensityMatrix, Error, Sign, SubsystemPartition};

use crate::config::{CommandKind, GridSpec, OutputFormat, Protocol, RunConfig};
use crate::input::load_state;

/// Negativity above this counts as localizable entanglement in the report verdict.
pub const SLE_MARGIN: f64 = 1e-9;

fn render<T: Serialize>(value: &T, format: OutputFormat, csv: impl FnOnce() -> anyhow::Result<String>) -> anyhow::Result<String> {
    match format {
        OutputFormat::Json => Ok(serde_json::to_string_pretty(value)? + "\n"),
        OutputFormat::Csv => csv(),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

fn sign_label(sign: CertifiedSign) -> &'static str {
    match sign {
        CertifiedSign::Negative => "negative",
        CertifiedSign::Positive => "positive",
        CertifiedSign::Indeterminate => "indeterminate",
    }
}

/// Validate the configuration and run the selected subcommand.
pub fn run(cfg: &RunConfig) -> anyhow::Result<String> {
    cfg.validate()?;
    match cfg.subcommand.expect("validated") {
        CommandKind::Certify => cmd_certify(cfg),
        CommandKind::Distill => cmd_distill(cfg),
        CommandKind::Sweep => cmd_sweep(cfg),
        CommandKind::Coincidence => cmd_coincidence(cfg),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CertifyReport {
    pub input: String,
    pub n_qubits: usize,
    /// `None` when the state is not X-shaped.
    pub gme_concurrence: Option<f64>,
    pub ghz_fidelity: f64,
    pub ghz_witness: f64,
    pub w_witness: f64,
    pub ppt_mixer: WitnessResult,
    pub sle_negativity: SleResult,
    pub sle_min_eigenvalue: SleResult,
    pub gme_certified: bool,
    pub sle_certified: bool,
}

const CERTIFY_COLUMNS: [&str; 16] = [
    "gme_concurrence",
    "ghz_fidelity",
    "ghz_witness",
    "w_witness",
    "ppt_value",
    "ppt_sign",
    "ppt_converged",
    "ppt_iterations",
    "sle_negativity",
    "sle_negativity_theta",
    "sle_negativity_phi",
    "sle_min_eigenvalue",
    "sle_min_eigenvalue_theta",
    "sle_min_eigenvalue_phi",
    "gme_certified",
    "sle_certified",
];

impl CertifyReport {
    fn csv_fields(report: Option<&Self>) -> Vec<String> {
        let Some(r) = report else {
            return vec![String::new(); CERTIFY_COLUMNS.len()];
        };
        vec![
            opt(r.gme_concurrence),
            real(r.ghz_fidelity),
            real(r.ghz_witness),
            real(r.w_witness),
            real(r.ppt_mixer.optimal_value),
            sign_label(r.ppt_mixer.sign).into(),
            r.ppt_mixer.converged.to_string(),
            r.ppt_mixer.iterations.to_string(),
            real(r.sle_negativity.value),
            real(r.sle_negativity.theta),
            real(r.sle_negativity.phi),
            real(r.sle_min_eigenvalue.value),
            real(r.sle_min_eigenvalue.theta),
            real(r.sle_min_eigenvalue.phi),
            r.gme_certified.to_string(),
            r.sle_certified.to_string(),
        ]
    }
}

fn require_three_qubits(rho: &DensityMatrix, what: &str) -> anyhow::Result<()> {
    ensure!(rho.n_qubits() == 3, "{what} needs a three-qubit state, got {} qubits", rho.n_qubits());
    Ok(())
}

/// All certifiers on one three-qubit state.
pub fn certify_state(input: &str, rho: &DensityMatrix, cfg: &RunConfig) -> anyhow::Result<CertifyReport> {
    require_three_qubits(rho, "certify")?;
    let gme_concurrence = match gme_concurrence_x(rho) {
        Ok(c) => Some(c),
        Err(Error::NotXShaped { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let keep: Vec<usize> = (0..3).filter(|&q| q != cfg.measured_qubit).collect();
    let pair = SubsystemPartition::kept(3, &keep)?;
    let ppt_mixer = ppt_mixer_witness(rho, &cfg.solver)?;
    let sle_negativity = sle_quantify(rho, &pair, Quantifier::Negativity)?;
    let sle_min_eigenvalue = sle_quantify(rho, &pair, Quantifier::MinEigenvalueAfterPt)?;
    let gme_certified = gme_concurrence.is_some_and(|c| c > 0.0) || ppt_mixer.sign == CertifiedSign::Negative;
    let sle_certified = sle_negativity.value > SLE_MARGIN;
    Ok(CertifyReport {
        input: input.to_string(),
        n_qubits: rho.n_qubits(),
        gme_concurrence,
        ghz_fidelity: rho.fidelity_with_pure(&make_ghz(0, Sign::Plus)?)?,
        ghz_witness: ghz_witness_expectation(rho)?,
        w_witness: w_witness_expectation(rho)?,
        ppt_mixer,
        sle_negativity,
        sle_min_eigenvalue,
        gme_certified,
        sle_certified,
    })
}

fn cmd_certify(cfg: &RunConfig) -> anyhow::Result<String> {
    let input = &cfg.inputs[0];
    let rho = load_state(input)?;
    require_three_qubits(&rho, "certify")?;
    let report = certify_state(input, &rho, cfg)?;
    render(&report, cfg.format, || {
        let mut header = vec!["input", "n_qubits"];
        header.extend(CERTIFY_COLUMNS);
        let mut row = vec![report.input.clone(), report.n_qubits.to_string()];
        row.extend(CertifyReport::csv_fields(Some(&report)));
        Ok(csv_table(&header, [row])?)
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalizationReport {
    pub spec: String,
    pub probability: f64,
    pub epr_fidelity: f64,
    pub state: DensityMatrix,
}

#[derive(Debug, Clone, Serialize)]
pub struct DistillReport {
    pub protocol: Protocol,
    pub inputs: [String; 2],
    pub input_fidelities: [f64; 2],
    pub success_probability: f64,
    /// GHZ fidelity for `pbs`, W fidelity for `cnot`.
    pub fidelity: f64,
    /// GHZ witness for `pbs`, W witness for `cnot`.
    pub witness: f64,
    pub parity_branch_weights: Vec<(String, f64)>,
    pub state: DensityMatrix,
    pub localization: Option<LocalizationReport>,
    pub recertified: Option<CertifyReport>,
}

fn cmd_distill(cfg: &RunConfig) -> anyhow::Result<String> {
    let inputs = [cfg.inputs[0].clone(), cfg.inputs.last().expect("validated").clone()];
    let rho1 = load_state(&inputs[0])?;
    let rho2 = load_state(&inputs[1])?;
    require_three_qubits(&rho1, "distillation")?;
    require_three_qubits(&rho2, "distillation")?;

    let (outcome, target) = match cfg.protocol {
        Protocol::Pbs => (distill_tripartite(&rho1, &rho2)?, make_ghz(0, Sign::Plus)?),
        Protocol::Cnot => (distill_cnot(&rho1, &rho2)?, w_state()),
    };
    let witness = match cfg.protocol {
        Protocol::Pbs => ghz_witness_expectation(&outcome.state)?,
        Protocol::Cnot => w_witness_expectation(&outcome.state)?,
    };
    let localization = cfg
        .localize
        .map(|spec| -> anyhow::Result<LocalizationReport> {
            let (state, probability) = localize(&outcome.state, spec.qubit, spec.basis, spec.outcome)?;
            Ok(LocalizationReport {
                spec: spec.to_string(),
                probability,
                epr_fidelity: state.fidelity_with_pure(&bell_phi_plus())?,
                state,
            })
        })
        .transpose()?;
    let recertified = if cfg.recertify {
        Some(certify_state("distilled", &outcome.state, cfg)?)
    } else {
        None
    };
    let report = DistillReport {
        protocol: cfg.protocol,
        input_fidelities: [rho1.fidelity_with_pure(&target)?, rho2.fidelity_with_pure(&target)?],
        inputs,
        success_probability: outcome.success_probability,
        fidelity: outcome.state.fidelity_with_pure(&target)?,
        witness,
        parity_branch_weights: outcome.parity_branch_weights,
        state: outcome.state,
        localization,
        recertified,
    };
    render(&report, cfg.format, || {
        let mut header = vec![
            "protocol",
            "input1",
            "input2",
            "success_probability",
            "fidelity",
            "witness",
            "localize",
            "localization_probability",
            "epr_fidelity",
        ];
        header.extend(CERTIFY_COLUMNS);
        let loc = report.localization.as_ref();
        let mut row = vec![
            match report.protocol {
                Protocol::Pbs => "pbs".to_string(),
                Protocol::Cnot => "cnot".to_string(),
            },
            report.inputs[0].clone(),
            report.inputs[1].clone(),
            real(report.success_probability),
            real(report.fidelity),
            real(report.witness),
            loc.map(|l| l.spec.clone()).unwrap_or_default(),
            opt(loc.map(|l| l.probability)),
            opt(loc.map(|l| l.epr_fidelity)),
        ];
        row.extend(CertifyReport::csv_fields(report.recertified.as_ref()));
        Ok(csv_table(&header, [row])?)
    })
}

fn grid_points(g: &GridSpec) -> anyhow::Result<Vec<f64>> {
    Ok(linear_grid(g.start, g.stop, g.count)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct ValueRow {
    pub p: f64,
    pub values: Vec<(Property, f64)>,
}

fn cmd_sweep(cfg: &RunConfig) -> anyhow::Result<String> {
    if let Some(g) = &cfg.curves {
        let rows = fidelity_curves(&grid_points(g)?)?;
        return render(&rows, cfg.format, || Ok(fidelity_curves_csv(&rows)?));
    }
    if let Some(props) = &cfg.thresholds {
        let reports: Vec<ThresholdReport> = props
            .0
            .par_iter()
            .map(|&prop| {
                let tol = cfg.tolerance.unwrap_or(prop.default_tolerance());
                find_threshold(prop, prop.default_range(), tol).with_context(|| format!("threshold of {prop}"))
            })
            .collect::<anyhow::Result<_>>()?;
        return render(&reports, cfg.format, || Ok(thresholds_csv(&reports)?));
    }
    let props = cfg.values.as_ref().context("sweep mode")?;
    let grid = grid_points(cfg.grid.as_ref().context("values sweep needs a grid")?)?;
    let rows: Vec<ValueRow> = grid
        .par_iter()
        .map(|&p| -> anyhow::Result<ValueRow> {
            let values = props
                .0
                .iter()
                .map(|&prop| Ok((prop, prop.quantity(p)?)))
                .collect::<anyhow::Result<_>>()?;
            Ok(ValueRow { p, values })
        })
        .collect::<anyhow::Result<_>>()?;
    render(&rows, cfg.format, || {
        let mut header = vec!["p"];
        header.extend(props.0.iter().map(|p| p.label()));
        Ok(csv_table(
            &header,
            rows.iter().map(|r| std::iter::once(real(r.p)).chain(r.values.iter().map(|(_, v)| real(*v))).collect::<Vec<_>>()),
        )?)
    })
}

fn cmd_coincidence(cfg: &RunConfig) -> anyhow::Result<String> {
    if let Some(p) = cfg.schedule {
        let schedule = preparation_schedule(p)?;
        return render(&schedule, cfg.format, || Ok(schedule.to_csv()?));
    }
    if let Some(sample) = &cfg.sample {
        let setting: PauliSetting = sample.setting.parse()?;
        let input = cfg.inputs.first().map(String::as_str).unwrap_or("noisy-ghz:1");
        let rho = load_state(input)?;
        ensure!(
            rho.n_qubits() == setting.n_qubits(),
            "setting `{setting}` has {} qubits but `{input}` has {}",
            setting.n_qubits(),
            rho.n_qubits()
        );
        let histogram = sample_counts(&rho, &setting, sample.shots, sample.seed.unwrap_or(cfg.seed))?;
        return render(&histogram, cfg.format, || {
            Ok(csv_table(
                &["outcome", "count"],
                histogram.histogram.iter().map(|(k, v)| vec![k.clone(), v.to_string()]),
            )?)
        });
    }
    let report = enumerate_same_order_events();
    render(&report, cfg.format, || Ok(report.to_csv()?))
}
