//! Fiber operators: the restriction of `Laplacian + V` to one period cell
//! with Floquet boundary phases, as a `pq x pq` Hermitian matrix.
//!
//! Vectorization: site `(n, m)` of the cell is index `n * q + m`, so the
//! matrix is `L_p(theta) (x) I_q + I_p (x) L_q(phi) + diag(V)`, with `L_r` the
//! twisted ring Laplacian from [`crate::laplace1d`].

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::CosineRing;
use crate::eigen::{hermitian_eigenvalues_with, EigenOptions, EigenvalueList, HermitianMatrix};
use crate::error::{Error, Result};
use crate::laplace1d::{eigenvalues_1d, twisted_laplacian_matrix, EigenvalueWithMultiplicity, SpecialPhase};
use crate::lattice::{lcm, BlochPhase, Period};
use crate::potential::Potential;

/// Rounding bound for closed-form separable eigenvalues.
pub const SEPARABLE_RESIDUAL: f64 = 32.0 * f64::EPSILON;

#[derive(Debug, Clone, PartialEq)]
pub struct FiberMatrix {
    pub period: Period,
    pub theta: f64,
    pub phi: f64,
    pub matrix: HermitianMatrix,
}

impl FiberMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Fiber matrix at a point of the reduced zone.
pub fn build_fiber(v: &Potential, phase: BlochPhase) -> FiberMatrix {
    build_fiber_at(v, phase.theta(), phase.phi())
}

/// Fiber matrix at arbitrary real phases (no folding applied).
pub fn build_fiber_at(v: &Potential, theta: f64, phi: f64) -> FiberMatrix {
    let period = v.period();
    let (p, q) = (period.p(), period.q());
    let n = p * q;
    let lp = twisted_laplacian_matrix(p, theta);
    let lq = twisted_laplacian_matrix(q, phi);
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];

    for a in 0..p {
        for a2 in 0..p {
            let h = lp[a * p + a2];
            if h == Complex64::new(0.0, 0.0) {
                continue;
            }
            for b in 0..q {
                data[(a * q + b) * n + a2 * q + b] += h;
            }
        }
    }
    for a in 0..p {
        for b in 0..q {
            for b2 in 0..q {
                let h = lq[b * q + b2];
                if h != Complex64::new(0.0, 0.0) {
                    data[(a * q + b) * n + a * q + b2] += h;
                }
            }
        }
    }
    for (i, &val) in v.values().iter().enumerate() {
        data[i * n + i] += val;
    }
    // mirror the upper triangle so the matrix is exactly Hermitian
    for i in 0..n {
        data[i * n + i].im = 0.0;
        for j in i + 1..n {
            data[j * n + i] = data[i * n + j].conj();
        }
    }
    FiberMatrix {
        period,
        theta,
        phi,
        matrix: HermitianMatrix::from_hermitian_parts(n, data),
    }
}

/// Ascending fiber eigenvalues with their residual bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberSpectrum {
    pub period: Period,
    pub phase: BlochPhase,
    pub eigenvalues: Vec<f64>,
    pub residual_bound: f64,
}

pub fn fiber_eigenvalues(v: &Potential, phase: BlochPhase) -> Result<FiberSpectrum> {
    fiber_eigenvalues_with(v, phase, &EigenOptions::default())
}

pub fn fiber_eigenvalues_with(v: &Potential, phase: BlochPhase, opts: &EigenOptions) -> Result<FiberSpectrum> {
    let list = fiber_values_at(v, phase.theta(), phase.phi(), opts)?;
    Ok(FiberSpectrum {
        period: v.period(),
        phase,
        eigenvalues: list.values,
        residual_bound: list.residual_bound,
    })
}

/// Eigenvalues at raw phases; the free Laplacian goes through the
/// separable closed form, everything else through the dense solver.
pub(crate) fn fiber_values_at(v: &Potential, theta: f64, phi: f64, opts: &EigenOptions) -> Result<EigenvalueList> {
    if v.is_zero() {
        let per = v.period();
        return Ok(EigenvalueList {
            values: separable_values(per.p(), per.q(), theta, phi),
            residual_bound: SEPARABLE_RESIDUAL,
        });
    }
    let fiber = build_fiber_at(v, theta, phi);
    hermitian_eigenvalues_with(&fiber.matrix, opts).map_err(|e| Error::AtPhase {
        theta,
        phi,
        source: Box::new(e),
    })
}

fn separable_values(p: usize, q: usize, theta: f64, phi: f64) -> Vec<f64> {
    let a = eigenvalues_1d(p, theta).eigenvalues;
    let b = eigenvalues_1d(q, phi).eigenvalues;
    let mut out = Vec::with_capacity(p * q);
    for x in &a {
        for y in &b {
            out.push(x + y);
        }
    }
    out.sort_by(|x, y| x.total_cmp(y));
    out
}

/// Sorted sums `lambda_k(theta) + mu_l(phi)` of the two ring spectra: the
/// fiber spectrum of the free Laplacian.
pub fn separable_eigenvalues(p: usize, q: usize, phase: BlochPhase) -> Vec<f64> {
    separable_values(p, q, phase.theta(), phase.phi())
}

/// Result of counting eigenvalues strictly below an energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EigenCount {
    /// `count` eigenvalues lie below `E`; the nearest is `distance` away.
    Count { count: usize, distance: f64 },
    /// Some eigenvalue lies within the safety margin of `E`.
    TooClose { distance: f64 },
}

impl EigenCount {
    pub fn count(&self) -> Option<usize> {
        match *self {
            EigenCount::Count { count, .. } => Some(count),
            EigenCount::TooClose { .. } => None,
        }
    }

    pub fn distance(&self) -> f64 {
        match *self {
            EigenCount::Count { distance, .. } | EigenCount::TooClose { distance } => distance,
        }
    }

    fn classify(count: usize, distance: f64, margin: f64) -> Self {
        if distance > margin {
            EigenCount::Count { count, distance }
        } else {
            EigenCount::TooClose { distance }
        }
    }
}

/// `#{j : lambda_j(theta, phi) < E}`, refusing to answer when an eigenvalue
/// is within `safety_margin` of `E`.
pub fn count_below(v: &Potential, phase: BlochPhase, energy: f64, safety_margin: f64) -> Result<EigenCount> {
    count_below_at(v, phase.theta(), phase.phi(), energy, safety_margin, &EigenOptions::default())
}

pub(crate) fn count_below_at(
    v: &Potential,
    theta: f64,
    phi: f64,
    energy: f64,
    safety_margin: f64,
    opts: &EigenOptions,
) -> Result<EigenCount> {
    if v.is_zero() {
        let per = v.period();
        if !(safety_margin > SEPARABLE_RESIDUAL) {
            return Err(margin_error(safety_margin, SEPARABLE_RESIDUAL));
        }
        let counter = SeparableCounter::new(per.p(), per.q(), theta, phi);
        let (count, distance) = counter.count(energy);
        return Ok(EigenCount::classify(count, distance, safety_margin));
    }
    let list = fiber_values_at(v, theta, phi, opts)?;
    if !(safety_margin > list.residual_bound) {
        return Err(margin_error(safety_margin, list.residual_bound));
    }
    Ok(count_in_list(&list.values, energy, safety_margin))
}

fn margin_error(margin: f64, residual: f64) -> Error {
    Error::InvalidArgument(format!(
        "safety margin {margin:e} must exceed the eigensolver residual bound {residual:e}"
    ))
}

pub(crate) fn count_in_list(sorted: &[f64], energy: f64, margin: f64) -> EigenCount {
    let count = sorted.partition_point(|&x| x < energy);
    let mut distance = f64::INFINITY;
    if count > 0 {
        distance = distance.min(energy - sorted[count - 1]);
    }
    if count < sorted.len() {
        distance = distance.min(sorted[count] - energy);
    }
    EigenCount::classify(count, distance, margin)
}

/// Eigenvalue counting for the free Laplacian in `O(p log q)` without
/// forming the `pq` sums.
#[derive(Debug, Clone)]
pub struct SeparableCounter {
    horizontal: Vec<f64>,
    vertical: Vec<f64>,
}

impl SeparableCounter {
    pub fn new(p: usize, q: usize, theta: f64, phi: f64) -> Self {
        Self {
            horizontal: eigenvalues_1d(p, theta).eigenvalues,
            vertical: eigenvalues_1d(q, phi).eigenvalues,
        }
    }

    pub fn dim(&self) -> usize {
        self.horizontal.len() * self.vertical.len()
    }

    /// Strict count below `energy` and the distance to the nearest sum.
    pub fn count(&self, energy: f64) -> (usize, f64) {
        let ys = &self.vertical;
        let mut count = 0;
        let mut distance = f64::INFINITY;
        for &x in &self.horizontal {
            let k = ys.partition_point(|&y| x + y < energy);
            count += k;
            if k > 0 {
                distance = distance.min(energy - (x + ys[k - 1]));
            }
            if k < ys.len() {
                distance = distance.min((x + ys[k]) - energy);
            }
        }
        (count, distance)
    }

    pub fn classify(&self, energy: f64, margin: f64) -> EigenCount {
        let (count, distance) = self.count(energy);
        EigenCount::classify(count, distance, margin)
    }
}

/// Distinct free-Laplacian fiber eigenvalues at a special phase pair with
/// exact multiplicities.
///
/// Eigenvalues are grouped by their exact value in the cyclotomic ring of
/// angles `pi k / M`, `M = lcm(2p, 2q)`, never by floating comparison.
pub fn multiplicity_profile(period: Period, theta: SpecialPhase, phi: SpecialPhase) -> Vec<EigenvalueWithMultiplicity> {
    let (p, q) = (period.p(), period.q());
    let den = lcm(2 * p, 2 * q);
    let ring = CosineRing::new(den);
    // angle of ring eigenvalue k at phase t*pi/2 is pi (t + 4k) / (2r)
    let halves = |s: SpecialPhase| match s {
        SpecialPhase::Zero => 0i64,
        SpecialPhase::HalfPi => 1,
        SpecialPhase::Pi => 2,
    };
    let numerators = |r: usize, t: i64| -> Vec<i64> {
        let scale = (den / (2 * r)) as i64;
        (0..r as i64).map(|k| (t + 4 * k) * scale).collect()
    };
    let hn = numerators(p, halves(theta));
    let vn = numerators(q, halves(phi));
    let mut groups: HashMap<Vec<i64>, (f64, usize)> = HashMap::new();
    for &a in &hn {
        for &b in &vn {
            let key = ring.cos_sum(&[a, b]);
            let entry = groups.entry(key).or_insert((ring.value(a) + ring.value(b), 0));
            entry.1 += 1;
        }
    }
    let mut out: Vec<EigenvalueWithMultiplicity> = groups
        .into_values()
        .map(|(value, multiplicity)| EigenvalueWithMultiplicity { value, multiplicity })
        .collect();
    out.sort_by(|a, b| a.value.total_cmp(&b.value));
    out
}
