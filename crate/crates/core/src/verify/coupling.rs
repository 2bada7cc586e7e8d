//! Periodic perturbations of the Laplacian: the checkerboard counterexample,
//! limit-periodic truncations, and empirical small-coupling checks.

use serde::{Deserialize, Serialize};

use crate::bands::{band_structure, find_gaps, grid_error};
use crate::eigen::EigenOptions;
use crate::error::{Error, Result};
use crate::interval::{EnergyInterval, SpectrumApproximation};
use crate::lattice::Period;
use crate::potential::Potential;

/// Spectrum of `Laplacian + V^delta` on period `(2, 2)`, checked to consist of
/// `[-sqrt(16 + delta^2), -delta]` and `[delta, sqrt(16 + delta^2)]`.
pub fn kruger_gap(delta: f64, resolution: usize) -> Result<SpectrumApproximation> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let v = Potential::checkerboard(delta)?;
    let spec = band_structure(&v, resolution, &EigenOptions::default())?.spectrum();
    if spec.component_count() < 2 {
        return Err(Error::ResolutionTooCoarse {
            resolution,
            required: required_resolution(delta, v.period()),
        });
    }
    let outer = (16.0 + delta * delta).sqrt();
    let e = spec.error_bound;
    let iv = &spec.intervals;
    let ok = iv.len() == 2
        && (iv[0].lo + outer).abs() <= e
        && (iv[0].hi + delta).abs() <= e
        && (iv[1].lo - delta).abs() <= e
        && (iv[1].hi - outer).abs() <= e;
    if !ok {
        return Err(Error::CheckFailed(format!(
            "checkerboard spectrum {:?} does not match the predicted components within {e:e}",
            iv
        )));
    }
    Ok(spec)
}

/// Smallest resolution at which a gap of width `2 delta` survives merging.
fn required_resolution(delta: f64, period: Period) -> usize {
    let mut r = 2;
    while 2.0 * grid_error(period, r) * 1.0001 >= 2.0 * delta {
        r = 2 * r - 1;
    }
    r
}

/// Sum of `amplitude_j * V_j`, re-tiled to the last period.
///
/// Periods must be nested (each divides the next) and every layer must
/// satisfy `||V_j|| <= 1`, so the sum is bounded by the total amplitude.
pub fn limit_periodic_truncation(layers: &[(Potential, f64)]) -> Result<Potential> {
    let Some((last, _)) = layers.last() else {
        return Err(Error::InvalidArgument("at least one layer is required".into()));
    };
    let target = last.period();
    for w in layers.windows(2) {
        if !w[0].0.period().divides(&w[1].0.period()) {
            return Err(Error::NotNested(format!("{} does not divide {}", w[0].0.period(), w[1].0.period())));
        }
    }
    let mut values = vec![0.0; target.cells()];
    for (j, (v, amp)) in layers.iter().enumerate() {
        if !(*amp > 0.0 && amp.is_finite()) {
            return Err(Error::InvalidArgument(format!("layer {j}: amplitude must be positive, got {amp}")));
        }
        if v.sup_norm() > 1.0 {
            return Err(Error::InvalidArgument(format!(
                "layer {j}: sup norm {} exceeds 1",
                v.sup_norm()
            )));
        }
        for (acc, x) in values.iter_mut().zip(v.retile(target)?.values()) {
            *acc += amp * x;
        }
    }
    Potential::new(target, values)
}

/// Component count of `sigma(Laplacian + V)` at resolutions `R` and `2R - 1`
/// against the small-coupling law: one interval when a period is odd, at
/// most two otherwise, and any gap must contain zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceRecord {
    pub lambda: f64,
    pub components: usize,
    pub components_refined: usize,
    pub gaps: Vec<EnergyInterval>,
    pub compliant: bool,
}

/// Checks one potential; `lambda` is only recorded.
pub fn check_compliance(v: &Potential, lambda: f64, resolution: usize) -> Result<ComplianceRecord> {
    let opts = EigenOptions::default();
    let coarse = band_structure(v, resolution, &opts)?.spectrum();
    let fine = band_structure(v, 2 * resolution - 1, &opts)?.spectrum();
    let gaps = find_gaps(&fine, v);
    let limit = if v.period().has_odd() { 1 } else { 2 };
    let components = coarse.component_count();
    let components_refined = fine.component_count();
    let compliant = components == components_refined
        && components_refined <= limit
        && gaps.iter().all(|g| g.contains_open(0.0));
    Ok(ComplianceRecord {
        lambda,
        components,
        components_refined,
        gaps,
        compliant,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub period: Period,
    /// Largest `lambda` of the compliant prefix of the grid.
    pub largest_compliant: Option<f64>,
    pub first_violation: Option<ComplianceRecord>,
    pub records: Vec<ComplianceRecord>,
}

/// Scans `Laplacian + lambda V` over an ascending `lambda` grid and reports
/// where the small-coupling law first fails.
pub fn estimate_threshold(base: &Potential, lambdas: &[f64], resolution: usize) -> Result<ThresholdEstimate> {
    if lambdas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("lambda grid must be strictly ascending".into()));
    }
    if lambdas.iter().any(|l| !(*l >= 0.0 && l.is_finite())) {
        return Err(Error::InvalidArgument("lambda values must be finite and nonnegative".into()));
    }
    let mut records = Vec::with_capacity(lambdas.len());
    for &l in lambdas {
        records.push(check_compliance(&base.scaled(l)?, l, resolution)?);
    }
    let first_bad = records.iter().position(|r| !r.compliant);
    let prefix = &records[..first_bad.unwrap_or(records.len())];
    Ok(ThresholdEstimate {
        period: base.period(),
        largest_compliant: prefix.last().map(|r| r.lambda),
        first_violation: first_bad.map(|i| records[i].clone()),
        records,
    })
}
