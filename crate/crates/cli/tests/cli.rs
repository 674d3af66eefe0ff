use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use superact_core::coincidence::{enumerate_same_order_events, EmissionEvent};
use superact_core::distillation::{analytic_fidelity_after, analytic_localized_fidelity};
use superact_core::thresholds::{fidelity_curves, lookup, Property};

fn superact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_superact"))
        .args(args)
        .env_remove("SUPERACT_THREADS")
        .output()
        .expect("binary runs")
}

fn ok_stdout(args: &[&str]) -> String {
    let out = superact(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    serde_json::from_str(&ok_stdout(&all)).unwrap()
}

fn records(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn certify_noisy_ghz_half() {
    let v = json(&["certify", "noisy-ghz:0.5"]);
    // C = p - 3(1-p)/4 and tr(W rho) = 1/2 - (1+7p)/8 at p = 1/2.
    assert!((f(&v["gme_concurrence"]) - 0.125).abs() < 1e-12);
    assert!((f(&v["ghz_witness"]) + 0.0625).abs() < 1e-12);
    assert!(f(&v["sle_negativity"]["value"]) > 0.0);
    assert_eq!(v["sle_negativity"]["quantifier"], "negativity");
    assert_eq!(v["ppt_mixer"]["sign"], "negative");
    assert_eq!(v["gme_certified"], true);
    assert_eq!(v["sle_certified"], true);
}

#[test]
fn certify_pure_ghz() {
    let v = json(&["certify", "noisy-ghz:1.0"]);
    assert_eq!(v["gme_certified"], true);
    assert!((f(&v["gme_concurrence"]) - 1.0).abs() < 1e-12);
    assert!((f(&v["ghz_witness"]) + 0.5).abs() < 1e-12);
}

#[test]
fn certify_below_thresholds() {
    // Between 1/3 and 3/7: localizable entanglement but no GME.
    let v = json(&["certify", "noisy-ghz:0.36"]);
    assert_eq!(v["gme_concurrence"], 0.0);
    assert_eq!(v["gme_certified"], false);
    assert_eq!(v["sle_certified"], true);
    let v = json(&["certify", "noisy-ghz:0.3"]);
    assert_eq!(v["sle_certified"], false);
    assert!(f(&v["sle_min_eigenvalue"]["value"]) > 0.0);
}

#[test]
fn certify_csv_single_record() {
    let (header, rows) = records(&ok_stdout(&["certify", "noise-model:0.5,0.9084,0.9210"]));
    assert_eq!(rows.len(), 1);
    assert_eq!(header[0], "input");
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    assert_eq!(rows[0][col("gme_concurrence")].parse::<f64>().unwrap(), 0.0);
    assert_eq!(rows[0][col("input")], "noise-model:0.5,0.9084,0.9210");
}

#[test]
fn certify_rejects_non_hermitian_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.json");
    let mut re = vec![vec![0.0; 8]; 8];
    re[0][0] = 1.0;
    re[0][1] = 0.3;
    std::fs::write(&input, serde_json::json!({"n_qubits": 3, "re": re, "im": vec![vec![0.0; 8]; 8]}).to_string()).unwrap();
    let out_path = dir.path().join("report.json");
    let out = superact(&["certify", input.to_str().unwrap(), "-o", out_path.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("Hermitian"), "{err}");
    assert!(!out_path.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1, "no stray files");
}

#[test]
fn certify_reads_state_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("ghz.json");
    let rho = superact_core::state::noisy_ghz(0.7).unwrap();
    std::fs::write(&input, rho.to_json_string()).unwrap();
    let from_file = json(&["certify", input.to_str().unwrap()]);
    let builtin = json(&["certify", "noisy-ghz:0.7"]);
    assert_eq!(from_file["gme_concurrence"], builtin["gme_concurrence"]);
    assert_eq!(from_file["ppt_mixer"]["optimal_value"], builtin["ppt_mixer"]["optimal_value"]);
}

#[test]
fn malformed_inputs_fail() {
    for args in [
        vec!["certify", "noisy-ghz:2"],
        vec!["certify", "noisy-bell:0.5"],
        vec!["certify"],
        vec!["sweep", "--curves", "0:1:0"],
        vec!["sweep"],
        vec!["distill", "noisy-bell:0.5"],
        vec!["coincidence", "--sample", "setting=zz,shots=10"],
        vec!["sweep", "--curves", "0:1:3", "--tolerance", "-1"],
    ] {
        let out = superact(&args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(!out.stderr.is_empty());
        assert!(out.stdout.is_empty(), "{args:?} printed partial output");
    }
}

#[test]
fn distill_pbs() {
    let v = json(&["distill", "--protocol", "pbs", "noisy-ghz:0.5", "noisy-ghz:0.5"]);
    assert!((f(&v["fidelity"]) - analytic_fidelity_after(0.5).unwrap()).abs() < 1e-12);
    assert!((f(&v["fidelity"]) - 0.732142857142857).abs() < 1e-12);
    assert!((f(&v["success_probability"]) - 0.21875).abs() < 1e-12);
    assert_eq!(v["parity_branch_weights"].as_array().unwrap().len(), 8);
    // A single input is used for both copies.
    let once = json(&["distill", "noisy-ghz:0.5"]);
    assert_eq!(once["fidelity"], v["fidelity"]);
}

#[test]
fn distill_cnot_w() {
    let v = json(&["distill", "--protocol", "cnot", "noisy-w:0.6", "noisy-w:0.6"]);
    assert!(f(&v["witness"]) < 0.0);
    assert!(f(&v["fidelity"]) > f(&v["input_fidelities"][0]));
    let before = json(&["certify", "noisy-w:0.6"]);
    assert!(f(&before["w_witness"]) > 0.0);
}

#[test]
fn distill_then_localize() {
    for p in ["0.2", "0.5", "0.9"] {
        let spec = format!("noisy-ghz:{p}");
        let v = json(&["distill", &spec, "--localize", "X:2"]);
        let expected = analytic_localized_fidelity(p.parse().unwrap()).unwrap();
        assert!((f(&v["localization"]["epr_fidelity"]) - expected).abs() < 1e-12, "p={p}");
    }
}

#[test]
fn distill_recertify() {
    let v = json(&["distill", "noisy-ghz:0.4", "--recertify"]);
    assert_eq!(v["recertified"]["gme_certified"], true);
    let before = json(&["certify", "noisy-ghz:0.4"]);
    assert_eq!(before["gme_certified"], false);
}

#[test]
fn sweep_curves() {
    let text = ok_stdout(&["sweep", "--curves", "0:1:101"]);
    let (header, rows) = records(&text);
    assert_eq!(header, ["p", "F_initial", "F1", "F2"]);
    assert_eq!(rows.len(), 101);
    let ends = fidelity_curves(&[0.0, 1.0]).unwrap();
    for (row, end) in [(&rows[0], ends[0]), (&rows[100], ends[1])] {
        let vals: Vec<f64> = row.iter().map(|x| x.parse().unwrap()).collect();
        assert_eq!(vals, [end.p, end.f_initial, end.f1, end.f2]);
    }
    let (_, single) = records(&ok_stdout(&["sweep", "--curves", "0.5:0.5:1"]));
    assert_eq!(single.len(), 1);
}

#[test]
fn sweep_thresholds_subset() {
    let (header, rows) = records(&ok_stdout(&["sweep", "--thresholds", "GME,SLE,SLE-after-distill", "--tolerance", "1e-7"]));
    assert_eq!(header, ["property", "crossing_p", "bracket_width", "evaluations"]);
    let expect = [("GME", 3.0 / 7.0), ("SLE", 1.0 / 3.0), ("SLE-after-distill", lookup("SLE-after-distill").unwrap().value)];
    for (row, (label, value)) in rows.iter().zip(expect) {
        assert_eq!(row[0], label);
        assert!((row[1].parse::<f64>().unwrap() - value).abs() < 1e-6, "{label}");
        assert!(row[2].parse::<f64>().unwrap() <= 1e-7);
    }
}

#[test]
fn sweep_thresholds_all() {
    let v = json(&["sweep", "--thresholds", "all"]);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), Property::ALL.len());
    for (row, prop) in rows.iter().zip(Property::ALL) {
        assert_eq!(row["property"], prop.label());
        if let Some(c) = lookup(prop.label()) {
            assert!((f(&row["crossing_p"]) - c.value).abs() < 2.0 * prop.default_tolerance(), "{prop}");
        }
    }
}

#[test]
fn sweep_values() {
    let (header, rows) = records(&ok_stdout(&["sweep", "--values", "GME,W-SLE", "--grid", "0.2:0.6:5"]));
    assert_eq!(header, ["p", "GME", "W-SLE"]);
    assert_eq!(rows.len(), 5);
    let gme: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(gme[0], 0.0);
    assert!(gme[4] > 0.0);
}

#[test]
fn coincidence_table() {
    let (header, rows) = records(&ok_stdout(&["coincidence"]));
    assert_eq!(header.last().unwrap(), "coincidence");
    let report = enumerate_same_order_events();
    assert_eq!(rows.len(), report.events.len());
    let table = [
        ("H_t1 H_a1 | H_b1 H_c1 | H_a2 H_c2 | H_t2 H_b2", "1,1,1,1,1,1,1,1", "true"),
        ("V_t1 V_c1 | V_b1 V_a1 | V_a2 V_b2 | V_t2 V_c2", "1,1,1,1,1,1,1,1", "true"),
        ("H_t1 H_a1 | H_b1 H_b1 H_c1 H_c1 | 0 | H_t2 H_b2", "1,1,1,0,1,2,2,0", "false"),
        ("H_t1 H_a1 | H_b1 H_b1 H_c1 H_c1 | 0 | V_t2 V_c2", "1,1,1,0,0,2,3,0", "false"),
        ("H_t1 H_a1 | H_b1 V_b1 H_c1 V_a1 | 0 | H_t2 H_b2", "1,1,1,1,2,1,1,0", "false"),
        ("V_t1 V_c1 | H_b1 V_b1 H_c1 V_a1 | 0 | V_t2 V_c2", "1,1,0,1,1,1,2,1", "false"),
        ("H_t1 H_a1 | H_b1 V_b1 H_c1 V_a1 | 0 | V_t2 V_c2", "1,1,1,1,1,1,2,0", "false"),
        ("V_t1 V_c1 | H_b1 V_b1 H_c1 V_a1 | 0 | H_t2 H_b2", "1,1,0,1,2,1,1,1", "false"),
    ];
    for (event, counts, verdict) in table {
        let e: EmissionEvent = event.parse().unwrap();
        let sources: Vec<String> = (0..4).map(|s| e.source_text(s)).collect();
        let row = rows
            .iter()
            .find(|r| r[1..5] == sources[..] && r[5] == "out" && r[6] == "out")
            .unwrap_or_else(|| panic!("{event} missing"));
        assert_eq!(row[7..15].join(","), counts, "{event}");
        assert_eq!(row[15], verdict, "{event}");
    }
    // Every accepted event is a single pair per source.
    for row in rows.iter().filter(|r| r[15] == "true") {
        assert!(row[0].split('-').all(|g| !g.contains('^') && g != "0"), "{row:?}");
    }
}

#[test]
fn coincidence_schedule() {
    let (header, rows) = records(&ok_stdout(&["coincidence", "--schedule", "p=0.5"]));
    assert_eq!(header[0], "component");
    assert_eq!(rows.len(), 5);
    assert!((rows[0][4].parse::<f64>().unwrap() - 2.0 / 3.0).abs() < 1e-15);
    let v = json(&["coincidence", "--schedule", "0.5"]);
    assert!((f(&v["p_prime"]) - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn coincidence_sample_reproducible() {
    let args = ["coincidence", "--sample", "setting=zzz,shots=1000,seed=7", "--format", "json"];
    let a = ok_stdout(&args);
    let b = ok_stdout(&args);
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["shots"], 1000);
    assert_eq!(v["seed"], 7);
    let counts = v["histogram"].as_object().unwrap();
    assert_eq!(counts["000"].as_u64().unwrap() + counts["111"].as_u64().unwrap(), 1000);
    let other = ok_stdout(&["coincidence", "--sample", "setting=zzz,shots=1000,seed=8", "--format", "json"]);
    assert_ne!(a, other);
    // The run seed fills in a missing sample seed.
    let via_run_seed = ok_stdout(&["coincidence", "--sample", "setting=zzz,shots=1000", "--seed", "7", "--format", "json"]);
    assert_eq!(a, via_run_seed);
}

fn run_to_file(args: &[&str], path: &Path) -> Vec<u8> {
    let mut all = args.to_vec();
    all.extend(["--output", path.to_str().unwrap()]);
    let out = superact(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    std::fs::read(path).unwrap()
}

#[test]
fn identical_config_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["certify", "noisy-w:0.55", "--format", "json"],
        vec!["sweep", "--values", "SLE,W-GME", "--grid", "0.3:0.5:4"],
        vec!["coincidence", "--sample", "setting=xyy,shots=5000", "--seed", "3", "noisy-ghz:0.6"],
        vec!["coincidence", "--format", "json"],
    ] {
        let a = run_to_file(&args, &dir.path().join("a"));
        let b = run_to_file(&args, &dir.path().join("b"));
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("curves.csv");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "subcommand": "sweep",
            "curves": "0:1:11",
            "output": out,
        })
        .to_string(),
    )
    .unwrap();
    let status = superact(&["--config", cfg.to_str().unwrap()]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let (_, rows) = records(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 11);
    // Command-line mode replaces the configured one; output stays from the file.
    let status = superact(&["--config", cfg.to_str().unwrap(), "sweep", "--curves", "0:1:3"]);
    assert!(status.status.success());
    let (_, rows) = records(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 3);

    std::fs::write(&cfg, r#"{"subcommand": "sweep", "curvez": "0:1:3"}"#).unwrap();
    assert!(!superact(&["--config", cfg.to_str().unwrap()]).status.success());
}

#[test]
fn failure_keeps_existing_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.csv");
    std::fs::write(&out, "previous").unwrap();
    let status = superact(&["certify", "noisy-ghz:7", "-o", out.to_str().unwrap()]);
    assert!(!status.status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "previous");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn thread_cap() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_superact"))
            .args(["sweep", "--values", "GME", "--grid", "0:1:5"])
            .env("SUPERACT_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert!(one.status.success());
    assert_eq!(one.stdout, run("4").stdout);
    let bad = run("zero");
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("SUPERACT_THREADS"));
    assert!(!run("0").status.success());
}
