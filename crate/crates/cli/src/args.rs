//! Flag parsing.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use latticebands::Period;

use crate::{Command, Family, OutputFormat, RunConfig, DEFAULT_DELTA, DEFAULT_RESOLUTION, DEFAULT_SAMPLES, DEFAULT_TOLERANCE};

#[derive(Debug, Parser)]
#[command(name = "latticebands", version, about = "Spectra of periodic Schrodinger operators on the square lattice")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Certified enclosures of every band.
    Bands {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        source: Source,
    },
    /// The spectrum as a union of intervals, with its gaps.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        source: Source,
    },
    /// Eigenvalue counts below an energy over the phase grid.
    Quilt {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        source: Source,
        #[arg(long, allow_negative_numbers = true)]
        energy: f64,
    },
    /// Certify that the free Laplacian has no interior gaps.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Uniform energy samples in (-4, 4).
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        /// Check only every k-th exceptional energy.
        #[arg(long, default_value_t = 1)]
        exceptional_every: usize,
    },
    /// The two-component checkerboard spectrum.
    Counterexample {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
    },
    /// Scan a coupling grid for the first violation of the small-coupling law.
    Threshold {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        source: Source,
        /// Ascending coupling constants, comma separated.
        #[arg(long, value_delimiter = ',')]
        lambdas: Option<Vec<f64>>,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Period as PxQ, e.g. 5x4.
    #[arg(long)]
    pub period: Option<Period>,
    /// Phase grid points per direction.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    pub resolution: usize,
    /// Relative eigensolver tolerance.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json; inferred from --out when absent.
    #[arg(long)]
    pub format: Option<OutputFormat>,
    /// Maximum worker threads.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Seed for random potentials.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct Source {
    /// Potential file (.json or .csv).
    #[arg(long)]
    pub potential: Option<PathBuf>,
    /// Built-in potential: zero, checkerboard or random.
    #[arg(long)]
    pub family: Option<Family>,
    /// Checkerboard height or random sup norm.
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
}

impl Cli {
    pub fn into_config(self) -> RunConfig {
        let mut extras = RunConfig::new(Command::Bands);
        let (command, common, source) = match self.command {
            Sub::Bands { common, source } => (Command::Bands, common, Some(source)),
            Sub::Spectrum { common, source } => (Command::Spectrum, common, Some(source)),
            Sub::Quilt { common, source, energy } => {
                extras.energy = Some(energy);
                (Command::Quilt, common, Some(source))
            }
            Sub::Verify {
                common,
                samples,
                exceptional_every,
            } => {
                extras.samples = samples;
                extras.exceptional_every = exceptional_every;
                (Command::Verify, common, None)
            }
            Sub::Counterexample { common, delta } => {
                extras.delta = delta;
                (Command::Counterexample, common, None)
            }
            Sub::Threshold { common, source, lambdas } => {
                if let Some(l) = lambdas {
                    extras.lambdas = l;
                }
                (Command::Threshold, common, Some(source))
            }
        };
        let mut cfg = RunConfig {
            command,
            period: common.period,
            resolution: common.resolution,
            tolerance: common.tolerance,
            out: common.out,
            format: common.format,
            threads: common.threads,
            seed: common.seed,
            ..extras
        };
        if let Some(s) = source {
            cfg.potential = s.potential;
            cfg.family = s.family;
            cfg.amplitude = s.amplitude;
        }
        cfg
    }
}
