//! Command-line front end for `latticebands`.
//!
//! [`run`] executes one [`RunConfig`] and returns the rendered report;
//! [`emit_report`] writes it. Exit status 0 means success, 1 an analysis
//! finding (an uncertified energy, a failed counterexample check), 2 bad
//! input.

pub mod args;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use latticebands::bands::{band_structure, bands_to_csv, find_gaps, quilt_with, spectrum_to_csv, DEFAULT_SAFETY_MARGIN};
use latticebands::output::{format_number, round_significant, SIGNIFICANT_DIGITS};
use latticebands::verify::sweep::{verify_theorem_sweep_with, ExceptionalSelection};
use latticebands::verify::{estimate_threshold, kruger_gap};
use latticebands::{
    load_potential, Band, EigenOptions, EnergyInterval, Error, Period, Potential, PotentialFormat,
    SpectrumApproximation,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

pub const DEFAULT_RESOLUTION: usize = 65;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_SAMPLES: usize = 200;
pub const DEFAULT_DELTA: f64 = 0.5;
pub const DEFAULT_LAMBDAS: [f64; 7] = [0.0125, 0.025, 0.05, 0.1, 0.2, 0.4, 0.8];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Bands,
    Spectrum,
    Quilt,
    Verify,
    Counterexample,
    Threshold,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Bands => "bands",
            Command::Spectrum => "spectrum",
            Command::Quilt => "quilt",
            Command::Verify => "verify",
            Command::Counterexample => "counterexample",
            Command::Threshold => "threshold",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    /// `.csv` selects CSV; anything else is JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => OutputFormat::Csv,
            _ => OutputFormat::Json,
        }
    }
}

impl FromStr for OutputFormat {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(CliError::Input(format!("unknown format {other:?}, expected csv or json"))),
        }
    }
}

/// Built-in potentials used when no `--potential` file is given.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Zero,
    /// `+amplitude / -amplitude` on the two sublattices.
    Checkerboard,
    /// Uniform in `[-amplitude, amplitude]`, drawn from `--seed`.
    Random,
}

impl FromStr for Family {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().as_str() {
            "zero" => Ok(Family::Zero),
            "checkerboard" => Ok(Family::Checkerboard),
            "random" => Ok(Family::Random),
            other => Err(CliError::Input(format!(
                "unknown family {other:?}, expected zero, checkerboard or random"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub period: Option<Period>,
    pub potential: Option<PathBuf>,
    pub energy: Option<f64>,
    pub resolution: usize,
    pub tolerance: f64,
    pub out: Option<PathBuf>,
    /// Explicit format; otherwise inferred from `out`, defaulting to JSON.
    pub format: Option<OutputFormat>,
    /// Worker cap; `None` uses every core.
    pub threads: Option<usize>,
    pub seed: u64,
    pub family: Option<Family>,
    pub amplitude: f64,
    pub samples: usize,
    pub exceptional_every: usize,
    pub delta: f64,
    pub lambdas: Vec<f64>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            period: None,
            potential: None,
            energy: None,
            resolution: DEFAULT_RESOLUTION,
            tolerance: DEFAULT_TOLERANCE,
            out: None,
            format: None,
            threads: None,
            seed: 0,
            family: None,
            amplitude: 1.0,
            samples: DEFAULT_SAMPLES,
            exceptional_every: 1,
            delta: DEFAULT_DELTA,
            lambdas: DEFAULT_LAMBDAS.to_vec(),
        }
    }

    pub fn output_format(&self) -> OutputFormat {
        self.format
            .or_else(|| self.out.as_deref().map(OutputFormat::from_path))
            .unwrap_or(OutputFormat::Json)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Input(m));
        if self.resolution < 2 {
            return bad(format!("resolution must be at least 2, got {}", self.resolution));
        }
        if !(self.tolerance > 0.0 && self.tolerance <= 1e-3) {
            return bad(format!("tolerance must lie in (0, 1e-3], got {}", self.tolerance));
        }
        match (self.command, self.energy) {
            (Command::Quilt, None) => return bad("quilt requires --energy".into()),
            (Command::Quilt, Some(e)) if !e.is_finite() => return bad(format!("energy must be finite, got {e}")),
            (c, Some(_)) if c != Command::Quilt => return bad(format!("--energy is only valid for quilt, not {}", c.name())),
            _ => {}
        }
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return bad(format!("amplitude must be finite and nonnegative, got {}", self.amplitude));
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        match self.command {
            Command::Verify => {
                if self.potential.is_some() || self.family.is_some() {
                    return bad("verify certifies the free Laplacian and takes no potential".into());
                }
                if self.period.is_none() {
                    return bad("verify requires --period".into());
                }
                if self.exceptional_every == 0 {
                    return bad("exceptional-every must be at least 1".into());
                }
            }
            Command::Counterexample => {
                if self.potential.is_some() || self.family.is_some() {
                    return bad("counterexample uses its own checkerboard potential".into());
                }
                if !(self.delta > 0.0 && self.delta.is_finite()) {
                    return bad(format!("delta must be positive, got {}", self.delta));
                }
            }
            _ => {
                if self.potential.is_some() && self.family.is_some() {
                    return bad("give either --potential or --family, not both".into());
                }
                if self.potential.is_none() && self.period.is_none() && self.family != Some(Family::Checkerboard) {
                    return bad("a period or a potential file is required".into());
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable files, unwritable outputs.
    Input(String),
    /// The computation ran but its finding is negative.
    Analysis(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Analysis(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Analysis(m) => write!(f, "analysis failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. }
            | Error::Parse(_)
            | Error::DimensionMismatch(_)
            | Error::NonFinite { .. }
            | Error::InvalidArgument(_)
            | Error::NotNested(_) => CliError::Input(e.to_string()),
            _ => CliError::Analysis(e.to_string()),
        }
    }
}

/// A rendered report and the exit status it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub report: String,
    pub exit_code: i32,
    /// Why the exit code is nonzero.
    pub finding: Option<String>,
}

/// Runs `config` on a pool capped at `config.threads` workers and writes
/// the report to `config.out` when set.
pub fn run(config: &RunConfig) -> Result<RunOutcome, CliError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Input(format!("cannot start worker pool: {e}")))?;
    let outcome = pool.install(|| execute(config))?;
    if let Some(path) = &config.out {
        write_output(path, &outcome.report)?;
    }
    Ok(outcome)
}

fn execute(config: &RunConfig) -> Result<RunOutcome, CliError> {
    let format = config.output_format();
    let opts = EigenOptions::with_tolerance(config.tolerance);
    log::info!("running {} with {:?} output", config.command.name(), format);
    let ok = |report: String| RunOutcome {
        report,
        exit_code: 0,
        finding: None,
    };
    match config.command {
        Command::Bands => {
            let v = resolve_potential(config)?;
            let bs = band_structure(&v, config.resolution, &opts)?;
            let report = BandsReport {
                period: bs.period,
                resolution: bs.resolution,
                grid_error: bs.grid_error,
                residual_bound: bs.residual_bound,
                error_bound: bs.error_bound(),
                union: bs.spectrum().intervals,
                bands: bs.bands,
            };
            Ok(ok(render(&report, format, || bands_to_csv(&report.bands))?))
        }
        Command::Spectrum => {
            let v = resolve_potential(config)?;
            let spec = band_structure(&v, config.resolution, &opts)?.spectrum();
            let report = SpectrumReport::new(v.period(), config.resolution, &v, spec);
            Ok(ok(render(&report, format, || spectrum_to_csv(&report.spectrum()))?))
        }
        Command::Quilt => {
            let v = resolve_potential(config)?;
            let energy = config.energy.expect("validated");
            let q = quilt_with(&v, energy, config.resolution, DEFAULT_SAFETY_MARGIN, &opts)?;
            Ok(ok(render(&q, format, || q.to_csv())?))
        }
        Command::Verify => {
            let period = config.period.expect("validated");
            let selection = if config.exceptional_every == 1 {
                ExceptionalSelection::All
            } else {
                ExceptionalSelection::Every(config.exceptional_every)
            };
            let rep = verify_theorem_sweep_with(period, config.samples, selection)?;
            let text = render(&rep, format, || verify_csv(&rep))?;
            let failures = rep.summary.failures;
            Ok(RunOutcome {
                report: text,
                exit_code: if failures == 0 { 0 } else { 1 },
                finding: (failures > 0).then(|| format!("{failures} required energies were not certified")),
            })
        }
        Command::Counterexample => {
            let spec = kruger_gap(config.delta, config.resolution)?;
            let report = CounterexampleReport {
                delta: config.delta,
                period: Period::square(2)?,
                resolution: config.resolution,
                predicted: vec![
                    EnergyInterval {
                        lo: -(16.0 + config.delta * config.delta).sqrt(),
                        hi: -config.delta,
                    },
                    EnergyInterval {
                        lo: config.delta,
                        hi: (16.0 + config.delta * config.delta).sqrt(),
                    },
                ],
                gap: EnergyInterval {
                    lo: spec.intervals[0].hi,
                    hi: spec.intervals[1].lo,
                },
                components: spec.component_count(),
                intervals: spec.intervals.clone(),
                error_bound: spec.error_bound,
            };
            Ok(ok(render(&report, format, || spectrum_to_csv(&spec))?))
        }
        Command::Threshold => {
            let base = resolve_potential(config)?;
            let est = estimate_threshold(&base, &config.lambdas, config.resolution)?;
            Ok(ok(render(&est, format, || {
                let mut out = String::from("lambda,components,components_refined,compliant\n");
                for r in &est.records {
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        format_number(r.lambda),
                        r.components,
                        r.components_refined,
                        r.compliant
                    ));
                }
                out
            })?))
        }
    }
}

/// The potential named by the flags: a file, a built-in family, or zero.
fn resolve_potential(config: &RunConfig) -> Result<Potential, CliError> {
    if let Some(path) = &config.potential {
        let v = load_potential(path, PotentialFormat::from_path(path))?;
        if let Some(p) = config.period {
            if p != v.period() {
                return Err(CliError::Input(format!(
                    "--period {p} disagrees with the potential file period {}",
                    v.period()
                )));
            }
        }
        return Ok(v);
    }
    let default_family = if config.command == Command::Threshold {
        Family::Random
    } else {
        Family::Zero
    };
    match config.family.unwrap_or(default_family) {
        Family::Zero => Ok(Potential::zero(config.period.expect("validated"))),
        Family::Checkerboard => {
            let v = Potential::checkerboard(config.amplitude)?;
            match config.period {
                Some(p) => Ok(v.retile(p)?),
                None => Ok(v),
            }
        }
        Family::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            Ok(Potential::random(config.period.expect("validated"), config.amplitude, &mut rng)?)
        }
    }
}

#[derive(Debug, Serialize)]
struct BandsReport {
    period: Period,
    resolution: usize,
    grid_error: f64,
    residual_bound: f64,
    error_bound: f64,
    bands: Vec<Band>,
    union: Vec<EnergyInterval>,
}

#[derive(Debug, Serialize)]
struct SpectrumReport {
    period: Period,
    resolution: usize,
    intervals: Vec<EnergyInterval>,
    error_bound: f64,
    unresolved_gaps: Vec<EnergyInterval>,
    gaps: Vec<EnergyInterval>,
    components: usize,
}

impl SpectrumReport {
    fn new(period: Period, resolution: usize, v: &Potential, spec: SpectrumApproximation) -> Self {
        Self {
            period,
            resolution,
            gaps: find_gaps(&spec, v),
            components: spec.component_count(),
            intervals: spec.intervals,
            error_bound: spec.error_bound,
            unresolved_gaps: spec.unresolved_gaps,
        }
    }

    fn spectrum(&self) -> SpectrumApproximation {
        SpectrumApproximation {
            intervals: self.intervals.clone(),
            error_bound: self.error_bound,
            unresolved_gaps: self.unresolved_gaps.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
struct CounterexampleReport {
    delta: f64,
    period: Period,
    resolution: usize,
    intervals: Vec<EnergyInterval>,
    error_bound: f64,
    components: usize,
    gap: EnergyInterval,
    predicted: Vec<EnergyInterval>,
}

fn verify_csv(rep: &latticebands::VerifyReport) -> String {
    let mut out = String::from("E,kind,status,required,route\n");
    for r in &rep.energies {
        let route = r
            .certificate
            .as_ref()
            .map(|c| match &c.route {
                latticebands::verify::certificate::CertificateRoute::Corners => "corners",
                latticebands::verify::certificate::CertificateRoute::PerturbedCorners { .. } => "perturbed_corners",
                latticebands::verify::certificate::CertificateRoute::ZeroEnergy { .. } => "zero_energy",
            })
            .unwrap_or("");
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            format_number(r.energy),
            tag(&r.kind),
            tag(&r.status),
            r.required,
            route
        ));
    }
    out
}

/// Serialized name of a unit enum variant.
fn tag<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(Value::String(s)) => s,
        _ => String::new(),
    }
}

fn render<T: Serialize>(value: &T, format: OutputFormat, csv: impl FnOnce() -> String) -> Result<String, CliError> {
    match format {
        OutputFormat::Csv => Ok(csv()),
        OutputFormat::Json => to_stable_json(value),
    }
}

/// JSON with sorted keys and every float rounded to twelve significant
/// digits, so repeated runs are byte-identical.
pub fn to_stable_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut v = serde_json::to_value(value).map_err(|e| CliError::Analysis(format!("cannot serialize report: {e}")))?;
    round_floats(&mut v);
    let mut text = serde_json::to_string_pretty(&sort_keys(v)).expect("value serializes");
    text.push('\n');
    Ok(text)
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_significant(n.as_f64().expect("f64"), SIGNIFICANT_DIGITS);
            let x = if x == 0.0 { 0.0 } else { x };
            if let Some(m) = serde_json::Number::from_f64(x) {
                *n = m;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn sort_keys(v: Value) -> Value {
    match v {
        Value::Object(o) => {
            let mut entries: Vec<(String, Value)> = o.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(entries.into_iter().map(|(k, v)| (k, sort_keys(v))).collect())
        }
        Value::Array(a) => Value::Array(a.into_iter().map(sort_keys).collect()),
        other => other,
    }
}

/// Serializes `result` in `format` and writes it to `path`.
pub fn emit_report<T: Serialize>(
    result: &T,
    format: OutputFormat,
    path: &Path,
    csv: impl FnOnce() -> String,
) -> Result<(), CliError> {
    let text = render(result, format, csv)?;
    write_output(path, &text)
}

fn write_output(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}
