//! Brillouin-zone sweeps: certified band enclosures, the spectrum as a union
//! of intervals, gaps, and eigenvalue-count quilts.
//!
//! Band functions are sampled on a uniform `R x R` grid of `[0, pi]^2`. The
//! fiber matrix depends on each phase with operator-norm Lipschitz constant
//! 1 (2 for a period-1 direction, where the phase enters as `2 cos`), so each
//! `lambda_j` moves by at most `(L_theta + L_phi) h / 2` between the grid and
//! any point of its cell, `h = pi / (R - 1)`.
//!
//! The spectrum is invariant under `(theta, phi) -> (-theta, -phi)`, but not
//! in general under `phi -> -phi` alone. When both periods are at least 3
//! and the potential is nonzero, the sweep therefore also samples the sheet
//! `[0, pi] x [-pi, 0]`; the two sheets cover the torus up to that symmetry.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::EigenOptions;
use crate::error::{Error, Result};
use crate::floquet::{count_in_list, fiber_values_at};
use crate::interval::{interval_union_with_gaps, EnergyInterval, SpectrumApproximation};
use crate::lattice::{BlochPhase, Period};
use crate::output::format_number;
use crate::potential::Potential;

pub const DEFAULT_RESOLUTION: usize = 65;

/// Smallest distance from `E` to a fiber spectrum accepted as a count.
pub const DEFAULT_SAFETY_MARGIN: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    /// 1-based band index.
    pub index: usize,
    pub enclosure: EnergyInterval,
    pub grid_error: f64,
}

/// All bands of one sweep together with the sweep's error budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandStructure {
    pub period: Period,
    pub resolution: usize,
    pub bands: Vec<Band>,
    pub grid_error: f64,
    pub residual_bound: f64,
}

impl BandStructure {
    pub fn error_bound(&self) -> f64 {
        self.grid_error + self.residual_bound
    }

    /// Union of the enclosures, fusing separations no wider than twice the
    /// error bound.
    pub fn spectrum(&self) -> SpectrumApproximation {
        let err = self.error_bound();
        let ivs: Vec<EnergyInterval> = self.bands.iter().map(|b| b.enclosure).collect();
        let (intervals, unresolved_gaps) = interval_union_with_gaps(&ivs, 2.0 * err);
        SpectrumApproximation {
            intervals,
            error_bound: err,
            unresolved_gaps,
        }
    }
}

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution < 2 {
        return Err(Error::InvalidArgument(format!(
            "resolution must be at least 2, got {resolution}"
        )));
    }
    Ok(())
}

/// Certified distance from any zone point to the sampled grid, in energy.
pub fn grid_error(period: Period, resolution: usize) -> f64 {
    let h = std::f64::consts::PI / (resolution - 1) as f64;
    let lip = |r: usize| if r == 1 { 2.0 } else { 1.0 };
    0.5 * (lip(period.p()) + lip(period.q())) * h
}

/// Whether `[0, pi]^2` alone misses part of the spectrum.
pub fn needs_conjugate_sheet(v: &Potential) -> bool {
    let per = v.period();
    per.p() >= 3 && per.q() >= 3 && !v.is_zero()
}

pub fn compute_bands(v: &Potential, resolution: usize) -> Result<Vec<Band>> {
    Ok(band_structure(v, resolution, &EigenOptions::default())?.bands)
}

pub fn band_structure(v: &Potential, resolution: usize, opts: &EigenOptions) -> Result<BandStructure> {
    check_resolution(resolution)?;
    let period = v.period();
    let n = period.cells();
    let sheets: &[f64] = if needs_conjugate_sheet(v) { &[1.0, -1.0] } else { &[1.0] };
    log::debug!("band sweep for {period} at resolution {resolution} over {} sheet(s)", sheets.len());

    let rows: Vec<(Vec<f64>, Vec<f64>, f64)> = (0..resolution)
        .into_par_iter()
        .map(|i| {
            let mut lo = vec![f64::INFINITY; n];
            let mut hi = vec![f64::NEG_INFINITY; n];
            let mut resid: f64 = 0.0;
            for k in 0..resolution {
                let ph = BlochPhase::grid_point(i, k, resolution);
                for &sign in sheets {
                    let list = fiber_values_at(v, ph.theta(), sign * ph.phi(), opts)?;
                    resid = resid.max(list.residual_bound);
                    for (j, &x) in list.values.iter().enumerate() {
                        lo[j] = lo[j].min(x);
                        hi[j] = hi[j].max(x);
                    }
                }
            }
            Ok((lo, hi, resid))
        })
        .collect::<Result<_>>()?;

    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    let mut residual_bound: f64 = 0.0;
    for (rl, rh, r) in rows {
        for j in 0..n {
            lo[j] = lo[j].min(rl[j]);
            hi[j] = hi[j].max(rh[j]);
        }
        residual_bound = residual_bound.max(r);
    }
    let ge = grid_error(period, resolution);
    let bands = (0..n)
        .map(|j| Band {
            index: j + 1,
            enclosure: EnergyInterval { lo: lo[j], hi: hi[j] },
            grid_error: ge,
        })
        .collect();
    Ok(BandStructure {
        period,
        resolution,
        bands,
        grid_error: ge,
        residual_bound,
    })
}

pub fn spectrum(v: &Potential, resolution: usize) -> Result<SpectrumApproximation> {
    spectrum_with(v, resolution, &EigenOptions::default())
}

pub fn spectrum_with(v: &Potential, resolution: usize, opts: &EigenOptions) -> Result<SpectrumApproximation> {
    Ok(band_structure(v, resolution, opts)?.spectrum())
}

/// Open intervals between consecutive components, clipped to the a priori
/// spectral range `[-4 - ||V||, 4 + ||V||]`.
pub fn find_gaps(spec: &SpectrumApproximation, v: &Potential) -> Vec<EnergyInterval> {
    let bound = 4.0 + v.sup_norm();
    spec.intervals
        .windows(2)
        .filter_map(|w| {
            let lo = w[0].hi.max(-bound);
            let hi = w[1].lo.min(bound);
            (hi - lo > 2.0 * spec.error_bound).then_some(EnergyInterval { lo, hi })
        })
        .collect()
}

/// Eigenvalue counts below a fixed energy over the phase grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quilt {
    pub energy: f64,
    pub resolution: usize,
    /// `counts[i][k]` at `(theta_i, phi_k)`; `None` where `E` was too close to
    /// the fiber spectrum.
    pub counts: Vec<Vec<Option<usize>>>,
    pub undefined_cells: Vec<(usize, usize)>,
}

impl Quilt {
    pub fn count(&self, i: usize, k: usize) -> Option<usize> {
        self.counts[i][k]
    }

    /// Count at the `(0,0)` corner.
    pub fn corner_zero(&self) -> Option<usize> {
        self.counts[0][0]
    }

    /// Count at the `(pi,pi)` corner.
    pub fn corner_pi(&self) -> Option<usize> {
        let last = self.resolution - 1;
        self.counts[last][last]
    }

    /// Row-major count matrix, rows indexed by theta; undefined cells are -1.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# theta_res phi_res E\n# {} {} {}\n",
            self.resolution,
            self.resolution,
            format_number(self.energy)
        );
        for row in &self.counts {
            let cells: Vec<String> = row
                .iter()
                .map(|c| c.map_or_else(|| "-1".to_string(), |c| c.to_string()))
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn quilt(v: &Potential, energy: f64, resolution: usize) -> Result<Quilt> {
    quilt_with(v, energy, resolution, DEFAULT_SAFETY_MARGIN, &EigenOptions::default())
}

/// Quilt with an explicit safety margin; the margin is raised to ten times
/// the residual bound of any solve that needs it.
pub fn quilt_with(
    v: &Potential,
    energy: f64,
    resolution: usize,
    safety_margin: f64,
    opts: &EigenOptions,
) -> Result<Quilt> {
    check_resolution(resolution)?;
    let counts: Vec<Vec<Option<usize>>> = (0..resolution)
        .into_par_iter()
        .map(|i| {
            (0..resolution)
                .map(|k| {
                    let ph = BlochPhase::grid_point(i, k, resolution);
                    let list = fiber_values_at(v, ph.theta(), ph.phi(), opts)?;
                    let margin = safety_margin.max(10.0 * list.residual_bound);
                    Ok(count_in_list(&list.values, energy, margin).count())
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let undefined_cells = counts
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().filter(|(_, c)| c.is_none()).map(move |(k, _)| (i, k)))
        .collect();
    Ok(Quilt {
        energy,
        resolution,
        counts,
        undefined_cells,
    })
}

pub fn bands_to_csv(bands: &[Band]) -> String {
    let mut out = String::from("j,lo,hi,grid_error\n");
    for b in bands {
        out.push_str(&format!(
            "{},{},{},{}\n",
            b.index,
            format_number(b.enclosure.lo),
            format_number(b.enclosure.hi),
            format_number(b.grid_error)
        ));
    }
    out
}

pub fn spectrum_to_csv(spec: &SpectrumApproximation) -> String {
    let mut out = format!("# error_bound {}\nlo,hi\n", format_number(spec.error_bound));
    for iv in &spec.intervals {
        out.push_str(&format!("{},{}\n", format_number(iv.lo), format_number(iv.hi)));
    }
    out
}
