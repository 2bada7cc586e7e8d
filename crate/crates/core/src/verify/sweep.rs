//! Energy sweeps certifying that the free Laplacian has no interior gaps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lattice::Period;
use crate::verify::certificate::{certify_with_table, Attempt, Certification, InteriorCertificate, Strategy};
use crate::verify::exceptional::{ExceptionalTable, EXCEPTIONAL_TOL};

/// Samples this close to an exceptional energy are left to the exact
/// exceptional entries.
pub const SAMPLE_EXCLUSION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyKind {
    Sample,
    Exceptional,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyStatus {
    Certified,
    Uncertified,
    Excluded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyRecord {
    #[serde(rename = "E")]
    pub energy: f64,
    pub kind: EnergyKind,
    pub status: EnergyStatus,
    /// Whether an uncertified status counts as a failure.
    pub required: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<InteriorCertificate>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub attempts: Option<Vec<Attempt>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SweepSummary {
    pub failures: usize,
    pub certified: usize,
    pub uncertified: usize,
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub period: Period,
    pub normalized_period: Period,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub zero_energy_period: Option<Period>,
    pub energies: Vec<EnergyRecord>,
    pub summary: SweepSummary,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.summary.failures == 0
    }

    pub fn zero_record(&self) -> Option<&EnergyRecord> {
        self.energies.iter().find(|r| r.kind == EnergyKind::Zero)
    }
}

/// Which exceptional energies to include.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExceptionalSelection {
    #[default]
    All,
    /// Every `k`-th one in increasing order (spot checks for large `r`).
    Every(usize),
    None,
}

/// Certifies `energy_samples` uniform energies in `(-4, 4)`, every
/// exceptional energy other than `-4, 0, 4`, and zero. Zero is required
/// only when a period is odd.
pub fn verify_theorem_sweep(period: Period, energy_samples: usize) -> Result<VerifyReport> {
    verify_theorem_sweep_with(period, energy_samples, ExceptionalSelection::All)
}

pub fn verify_theorem_sweep_with(
    period: Period,
    energy_samples: usize,
    selection: ExceptionalSelection,
) -> Result<VerifyReport> {
    let normalized = period.normalized_even();
    let table = ExceptionalTable::new(normalized.p())?;
    let set = table.set();

    let mut jobs: Vec<(f64, EnergyKind)> = (0..energy_samples)
        .map(|k| (-4.0 + 8.0 * (k as f64 + 0.5) / energy_samples as f64, EnergyKind::Sample))
        .collect();
    let interior: Vec<f64> = set
        .values
        .iter()
        .copied()
        .filter(|e| e.abs() > EXCEPTIONAL_TOL && (e.abs() - 4.0).abs() > EXCEPTIONAL_TOL)
        .collect();
    let chosen: Vec<f64> = match selection {
        ExceptionalSelection::All => interior,
        ExceptionalSelection::Every(k) => interior.into_iter().step_by(k.max(1)).collect(),
        ExceptionalSelection::None => Vec::new(),
    };
    jobs.extend(chosen.into_iter().map(|e| (e, EnergyKind::Exceptional)));
    jobs.push((0.0, EnergyKind::Zero));
    log::info!("certifying {} energies for {period} on {normalized}", jobs.len());

    let energies: Vec<EnergyRecord> = jobs
        .par_iter()
        .map(|&(e, kind)| {
            let required = kind != EnergyKind::Zero || period.has_odd();
            if kind == EnergyKind::Sample && set.distance(e) <= SAMPLE_EXCLUSION {
                return EnergyRecord {
                    energy: e,
                    kind,
                    status: EnergyStatus::Excluded,
                    required: false,
                    certificate: None,
                    attempts: None,
                    reason: Some("within 1e-6 of an exceptional energy".into()),
                };
            }
            match certify_with_table(e, period, Strategy::Auto, &table) {
                Certification::Certified(c) => EnergyRecord {
                    energy: e,
                    kind,
                    status: EnergyStatus::Certified,
                    required,
                    certificate: Some(c),
                    attempts: None,
                    reason: None,
                },
                Certification::Uncertified(f) => EnergyRecord {
                    energy: e,
                    kind,
                    status: EnergyStatus::Uncertified,
                    required,
                    certificate: None,
                    attempts: Some(f.attempts),
                    reason: Some(f.reason),
                },
            }
        })
        .collect();

    let mut summary = SweepSummary::default();
    for r in &energies {
        match r.status {
            EnergyStatus::Certified => summary.certified += 1,
            EnergyStatus::Excluded => summary.excluded += 1,
            EnergyStatus::Uncertified => {
                summary.uncertified += 1;
                if r.required {
                    summary.failures += 1;
                }
            }
        }
    }
    log::debug!("sweep summary for {period}: {summary:?}");
    Ok(VerifyReport {
        period,
        normalized_period: normalized,
        zero_energy_period: period.normalized_odd(),
        energies,
        summary,
    })
}
