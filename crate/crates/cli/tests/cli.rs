use std::path::Path;
use std::process::{Command, Output};

use latticebands::bands::Quilt;
use latticebands::verify::coupling::ThresholdEstimate;
use latticebands::verify::sweep::EnergyStatus;
use latticebands::{Period, Potential, VerifyReport};
use latticebands_cli::{run, to_stable_json, Command as Cmd, OutputFormat, RunConfig};
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latticebands"))
        .args(args)
        .env("LATTICEBANDS_LOG", "error")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn interval(v: &Value) -> (f64, f64) {
    (v["lo"].as_f64().unwrap(), v["hi"].as_f64().unwrap())
}

#[test]
fn bands_free_five_by_four() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bands.csv");
    let out = bin(&["bands", "--period", "5x4", "--resolution", "65", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("j,lo,hi,grid_error"));
    assert_eq!(lines.count(), 20);

    let out = bin(&["bands", "--period", "5x4"]);
    let v = json(&out);
    let union = v["union"].as_array().unwrap();
    assert_eq!(union.len(), 1);
    let (lo, hi) = interval(&union[0]);
    let err = v["error_bound"].as_f64().unwrap();
    assert!((lo + 4.0).abs() <= err && (hi - 4.0).abs() <= err);
}

#[test]
fn quilt_parity_corners() {
    let out = bin(&["quilt", "--period", "8x10", "--energy", "-0.01", "--resolution", "201", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# theta_res phi_res E"));
    assert_eq!(lines.next(), Some("# 201 201 -0.01"));
    let rows: Vec<Vec<i64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 201);
    assert!(rows.iter().all(|r| r.len() == 201));
    assert_eq!(rows[0][0] % 2, 1);
    assert_eq!(rows[200][200] % 2, 0);
}

#[test]
fn counterexample_gap() {
    let out = bin(&["counterexample", "--delta", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["components"], 2);
    let err = v["error_bound"].as_f64().unwrap();
    let (lo, hi) = interval(&v["gap"]);
    assert!((lo + 0.5).abs() <= err && (hi - 0.5).abs() <= err);
}

#[test]
fn exit_codes() {
    // unresolvable gap is an analysis finding
    assert_eq!(bin(&["counterexample", "--delta", "0.1", "--resolution", "5"]).status.code(), Some(1));
    for args in [
        &["bands", "--period", "3x3", "--resolution", "1"][..],
        &["bands", "--period", "3x3", "--tolerance", "0.1"],
        &["bands", "--period", "3y3"],
        &["quilt", "--period", "3x3"],
        &["spectrum", "--potential", "/nonexistent/v.json"],
        &["verify", "--period", "0x4"],
        &["verify"],
        &["threshold", "--period", "3x2", "--lambdas", "0.2,0.1"],
        &["bands", "--period", "2x2", "--threads", "0"],
    ] {
        assert_eq!(bin(args).status.code(), Some(2), "{args:?}");
    }
    let out = bin(&["verify", "--period", "8x10", "--samples", "40"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_report_schema() {
    let out = bin(&["verify", "--period", "8x10", "--samples", "40"]);
    let rep: VerifyReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep.summary.failures, 0);
    let zero = rep.zero_record().unwrap();
    assert_eq!(zero.status, EnergyStatus::Uncertified);
    assert!(!zero.required);
    let v = json(&out);
    let e = &v["energies"][0];
    assert!(e["E"].is_number() && e["status"].is_string());
    assert!(v["summary"]["failures"].is_u64());
}

#[test]
fn potential_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.json");
    let v = Potential::checkerboard(0.4).unwrap();
    std::fs::write(&path, v.to_json()).unwrap();
    let p = path.to_str().unwrap();
    let out = bin(&["spectrum", "--potential", p, "--resolution", "33"]);
    assert_eq!(out.status.code(), Some(0));
    let s = json(&out);
    assert_eq!(s["components"], 2);
    assert_eq!(s["gaps"].as_array().unwrap().len(), 1);
    assert_eq!(bin(&["spectrum", "--potential", p, "--period", "4x4"]).status.code(), Some(2));
    assert_eq!(
        bin(&["spectrum", "--potential", p, "--family", "random", "--period", "2x2"]).status.code(),
        Some(2)
    );
}

fn config(command: Cmd) -> RunConfig {
    let mut c = RunConfig::new(command);
    c.period = Some(Period::new(3, 4).unwrap());
    c.resolution = 17;
    c
}

fn determinism_configs() -> Vec<RunConfig> {
    let mut spectrum = config(Cmd::Spectrum);
    spectrum.family = Some(latticebands_cli::Family::Random);
    spectrum.amplitude = 0.7;
    spectrum.seed = 11;
    let mut bands = spectrum.clone();
    bands.command = Cmd::Bands;
    let mut quilt = spectrum.clone();
    quilt.command = Cmd::Quilt;
    quilt.energy = Some(0.3);
    let mut quilt_csv = quilt.clone();
    quilt_csv.format = Some(OutputFormat::Csv);
    let mut verify = config(Cmd::Verify);
    verify.period = Some(Period::new(5, 4).unwrap());
    let mut threshold = config(Cmd::Threshold);
    threshold.lambdas = vec![0.05, 0.5, 3.0];
    vec![spectrum, bands, quilt, quilt_csv, verify, threshold]
}

#[test]
fn identical_across_runs_and_thread_counts() {
    for mut cfg in determinism_configs() {
        cfg.threads = Some(1);
        let single = run(&cfg).unwrap().report;
        cfg.threads = Some(4);
        let multi = run(&cfg).unwrap().report;
        let again = run(&cfg).unwrap().report;
        assert_eq!(single, multi, "{:?}", cfg.command);
        assert_eq!(multi, again, "{:?}", cfg.command);
    }
}

#[test]
fn seed_changes_random_potential() {
    let mut a = determinism_configs().remove(0);
    let first = run(&a).unwrap().report;
    a.seed += 1;
    assert_ne!(first, run(&a).unwrap().report);
}

fn assert_sorted_keys(v: &Value) {
    match v {
        Value::Object(o) => {
            let keys: Vec<&String> = o.keys().collect();
            assert!(keys.windows(2).all(|w| w[0] < w[1]), "{keys:?}");
            o.values().for_each(assert_sorted_keys);
        }
        Value::Array(a) => a.iter().for_each(assert_sorted_keys),
        _ => {}
    }
}

#[test]
fn json_round_trip() {
    for cfg in determinism_configs() {
        if cfg.output_format() != OutputFormat::Json {
            continue;
        }
        let text = run(&cfg).unwrap().report;
        let value: Value = serde_json::from_str(&text).unwrap();
        assert_sorted_keys(&value);
        assert_eq!(to_stable_json(&value).unwrap(), text, "{:?}", cfg.command);
        let typed = match cfg.command {
            Cmd::Quilt => to_stable_json(&serde_json::from_str::<Quilt>(&text).unwrap()),
            Cmd::Verify => to_stable_json(&serde_json::from_str::<VerifyReport>(&text).unwrap()),
            Cmd::Threshold => to_stable_json(&serde_json::from_str::<ThresholdEstimate>(&text).unwrap()),
            _ => continue,
        };
        assert_eq!(typed.unwrap(), text, "{:?}", cfg.command);
    }
}

#[test]
fn writes_requested_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(Cmd::Spectrum);
    cfg.out = Some(dir.path().join("s.csv"));
    let outcome = run(&cfg).unwrap();
    assert_eq!(cfg.output_format(), OutputFormat::Csv);
    let text = std::fs::read_to_string(cfg.out.as_ref().unwrap()).unwrap();
    assert_eq!(text, outcome.report);
    assert!(text.starts_with("# error_bound "));

    cfg.out = Some(Path::new("/nonexistent/dir/s.csv").to_path_buf());
    assert_eq!(run(&cfg).unwrap_err().exit_code(), 2);
}
