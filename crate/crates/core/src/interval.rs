//! Closed energy intervals and finite unions of them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyInterval {
    pub lo: f64,
    pub hi: f64,
}

impl EnergyInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::InvalidArgument(format!(
                "interval endpoints out of order: [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(e: f64) -> Self {
        Self { lo: e, hi: e }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, e: f64) -> bool {
        self.lo <= e && e <= self.hi
    }

    /// Strict containment in the open interval `(lo, hi)`.
    pub fn contains_open(&self, e: f64) -> bool {
        self.lo < e && e < self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Sorted, disjoint union of the inputs where pieces separated by at most
/// `merge_tol` are fused.
pub fn interval_union(intervals: &[EnergyInterval], merge_tol: f64) -> Vec<EnergyInterval> {
    interval_union_with_gaps(intervals, merge_tol).0
}

/// Like [`interval_union`], also returning the positive separations that
/// were closed because they were no wider than `merge_tol`.
pub fn interval_union_with_gaps(
    intervals: &[EnergyInterval],
    merge_tol: f64,
) -> (Vec<EnergyInterval>, Vec<EnergyInterval>) {
    assert!(merge_tol >= 0.0, "merge tolerance must be nonnegative");
    let mut sorted = intervals.to_vec();
    sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
    let mut out: Vec<EnergyInterval> = Vec::with_capacity(sorted.len());
    let mut closed = Vec::new();
    for iv in sorted {
        match out.last_mut() {
            Some(last) if iv.lo - last.hi <= merge_tol => {
                if iv.lo > last.hi {
                    closed.push(EnergyInterval {
                        lo: last.hi,
                        hi: iv.lo,
                    });
                }
                last.hi = last.hi.max(iv.hi);
            }
            _ => out.push(iv),
        }
    }
    (out, closed)
}

/// A computed spectrum: components with a certified error bound.
///
/// The true spectrum lies within `error_bound` of the union of
/// `intervals`, and every grid value in `intervals` is within
/// `error_bound` of the true spectrum. Components are separated by more
/// than `2 * error_bound`. Separations at or below that threshold cannot
/// be resolved and are kept in `unresolved_gaps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumApproximation {
    pub intervals: Vec<EnergyInterval>,
    pub error_bound: f64,
    #[serde(default)]
    pub unresolved_gaps: Vec<EnergyInterval>,
}

impl SpectrumApproximation {
    pub fn component_count(&self) -> usize {
        self.intervals.len()
    }

    pub fn hull(&self) -> Option<EnergyInterval> {
        Some(EnergyInterval {
            lo: self.intervals.first()?.lo,
            hi: self.intervals.last()?.hi,
        })
    }
}
