//! Certificates that an energy lies in the interior of a band of the free
//! Laplacian.
//!
//! Two phases `a`, `b` with `E` off both fiber spectra and strict counts
//! `c_a < c_b` below `E` give `lambda_w(b) < E < lambda_w(a)` for
//! `w = c_a + 1`. Since `lambda_w` is continuous on the connected zone, it
//! takes the value `E` in between, and `E` is interior to `B_w`.

use serde::{Deserialize, Serialize};

use crate::eigen::{hermitian_eigenvalues_with, EigenOptions};
use crate::error::{Error, Result};
use crate::floquet::{build_fiber_at, EigenCount, SeparableCounter, SEPARABLE_RESIDUAL};
use crate::laplace1d::{derivative_magnitude, SpecialPhase};
use crate::floquet::multiplicity_profile;
use crate::lattice::{BlochPhase, Period};
use crate::potential::Potential;
use crate::verify::exceptional::{ExceptionalTable, EXCEPTIONAL_TOL};

/// Margins must exceed this multiple of the eigenvalue error.
pub const MARGIN_FACTOR: f64 = 10.0;
pub const EPSILON_START: f64 = 0.1;
pub const EPSILON_FLOOR: f64 = 1e-6;
/// Fallback tilt when no degenerate pair constrains it.
pub const DEFAULT_DELTA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    #[default]
    Auto,
    CornersOnly,
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Strategy::Auto),
            "corners_only" | "corners-only" => Ok(Strategy::CornersOnly),
            _ => Err(Error::Parse(format!("unknown strategy '{s}'"))),
        }
    }
}

/// Split of the zero eigenvalue at `(pi/2, 0)`: multiplicity `4t + 2` sitting
/// above `s` negative eigenvalues, with `s + ell_minus` and `s + ell_plus`
/// eigenvalues below zero at `(pi/2 -+ eps, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroEnergySplit {
    pub s: usize,
    pub t: usize,
    pub ell_minus: i64,
    pub ell_plus: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateRoute {
    /// `(0,0)` against `(pi,pi)`.
    Corners,
    /// `(eps, 0)` or `((1+delta) eps, eps)` against `(pi - eps, pi)`.
    PerturbedCorners { epsilon: f64, delta: f64 },
    /// `(pi/2 - eps, 0)` against `(pi/2 + eps, 0)` on a period with odd `p`.
    ZeroEnergy { epsilon: f64, split: ZeroEnergySplit },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteriorCertificate {
    pub energy: f64,
    /// Period whose fibers the phases refer to.
    pub period: Period,
    pub route: CertificateRoute,
    /// Set when the perturbation was designed for `-E` and used at `E`.
    pub reflected: bool,
    pub phase_a: BlochPhase,
    pub phase_b: BlochPhase,
    pub count_a: usize,
    pub count_b: usize,
    pub witness_band: usize,
    /// Smallest distance from `E` to either fiber spectrum.
    pub margin: f64,
}

/// One phase pair that was tried.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    pub route: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub epsilon: Option<f64>,
    pub phase_a: BlochPhase,
    pub phase_b: BlochPhase,
    pub count_a: EigenCount,
    pub count_b: EigenCount,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureReport {
    pub energy: f64,
    pub period: Period,
    pub reason: String,
    pub attempts: Vec<Attempt>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certification {
    Certified(InteriorCertificate),
    Uncertified(FailureReport),
}

impl Certification {
    pub fn certificate(&self) -> Option<&InteriorCertificate> {
        match self {
            Certification::Certified(c) => Some(c),
            Certification::Uncertified(_) => None,
        }
    }

    pub fn is_certified(&self) -> bool {
        self.certificate().is_some()
    }
}

/// Free-Laplacian counts on a fixed period, with the certification margin.
struct FreeCounter {
    period: Period,
    margin: f64,
}

impl FreeCounter {
    fn new(period: Period) -> Self {
        Self {
            period,
            margin: MARGIN_FACTOR * SEPARABLE_RESIDUAL,
        }
    }

    fn count(&self, phase: BlochPhase, e: f64) -> EigenCount {
        SeparableCounter::new(self.period.p(), self.period.q(), phase.theta(), phase.phi()).classify(e, self.margin)
    }

    /// Records the attempt and returns a certificate when the counts differ.
    fn try_pair(
        &self,
        e: f64,
        a: BlochPhase,
        b: BlochPhase,
        route: CertificateRoute,
        attempts: &mut Vec<Attempt>,
    ) -> Option<InteriorCertificate> {
        let ca = self.count(a, e);
        let cb = self.count(b, e);
        attempts.push(Attempt {
            route: route_name(&route).to_string(),
            epsilon: route_epsilon(&route),
            phase_a: a,
            phase_b: b,
            count_a: ca,
            count_b: cb,
        });
        match (ca, cb) {
            (
                EigenCount::Count { count: na, distance: da },
                EigenCount::Count { count: nb, distance: db },
            ) if na != nb => Some(InteriorCertificate {
                energy: e,
                period: self.period,
                route,
                reflected: false,
                phase_a: a,
                phase_b: b,
                count_a: na,
                count_b: nb,
                witness_band: na.min(nb) + 1,
                margin: da.min(db),
            }),
            _ => None,
        }
    }
}

fn route_name(route: &CertificateRoute) -> &'static str {
    match route {
        CertificateRoute::Corners => "corners",
        CertificateRoute::PerturbedCorners { .. } => "perturbed_corners",
        CertificateRoute::ZeroEnergy { .. } => "zero_energy",
    }
}

fn route_epsilon(route: &CertificateRoute) -> Option<f64> {
    match *route {
        CertificateRoute::Corners => None,
        CertificateRoute::PerturbedCorners { epsilon, .. } | CertificateRoute::ZeroEnergy { epsilon, .. } => {
            Some(epsilon)
        }
    }
}

fn epsilon_schedule() -> impl Iterator<Item = f64> {
    std::iter::successors(Some(EPSILON_START), |e| Some(e / 2.0)).take_while(|&e| e >= EPSILON_FLOOR)
}

fn phase(theta: f64, phi: f64) -> BlochPhase {
    BlochPhase::new(theta, phi).expect("perturbed phase stays in the zone")
}

/// Certifies `E` in the interior of a band of the free Laplacian with
/// period `period`.
///
/// Corners are compared on `(r, r)`, `r = lcm(p, q, 2)`. Exceptional
/// nonzero energies fall back to perturbed corners; zero energy with an odd
/// period falls back to perturbations of `(pi/2, 0)` on the period from
/// [`Period::normalized_odd`].
pub fn certify_interior(energy: f64, period: Period, strategy: Strategy) -> Result<Certification> {
    if !(energy > -4.0 && energy < 4.0) {
        return Err(Error::InvalidArgument(format!(
            "energy {energy} must lie in the open interval (-4, 4)"
        )));
    }
    let even = period.normalized_even();
    let table = ExceptionalTable::new(even.p())?;
    Ok(certify_with_table(energy, period, strategy, &table))
}

pub(crate) fn certify_with_table(
    energy: f64,
    period: Period,
    strategy: Strategy,
    table: &ExceptionalTable,
) -> Certification {
    let even = period.normalized_even();
    let counter = FreeCounter::new(even);
    let mut attempts = Vec::new();

    if let Some(c) = counter.try_pair(energy, BlochPhase::ZERO, BlochPhase::PI_PI, CertificateRoute::Corners, &mut attempts) {
        return Certification::Certified(c);
    }
    let fail = |reason: &str, period: Period, attempts: Vec<Attempt>| {
        log::debug!("E={energy} on {period} uncertified: {reason}");
        Certification::Uncertified(FailureReport {
            energy,
            period,
            reason: reason.to_string(),
            attempts,
        })
    };
    if strategy == Strategy::CornersOnly {
        return fail("corner counts agree or touch the spectrum", even, attempts);
    }

    if energy.abs() <= EXCEPTIONAL_TOL {
        return match period.normalized_odd() {
            Some(odd) => match certify_zero(energy, odd, &mut attempts) {
                Some(c) => Certification::Certified(c),
                None => fail("no count discrepancy near (pi/2, 0)", odd, attempts),
            },
            None => fail(
                "zero energy with both periods even: a gap at zero is possible",
                even,
                attempts,
            ),
        };
    }

    let reflected = energy > 0.0;
    let delta = tilt_for(table, -energy.abs(), even.p());
    for eps in epsilon_schedule() {
        let route = CertificateRoute::PerturbedCorners { epsilon: eps, delta };
        let top = phase(std::f64::consts::PI - eps, std::f64::consts::PI);
        for low in [phase(eps, 0.0), phase((1.0 + delta) * eps, eps)] {
            if let Some(mut c) = counter.try_pair(energy, low, top, route, &mut attempts) {
                c.reflected = reflected;
                return Certification::Certified(c);
            }
        }
    }
    fail("no count discrepancy down to the epsilon floor", even, attempts)
}

/// Tilt `delta` for the direction `((1+delta) eps, eps)`: half the smallest
/// `|lambda'_x(0)| / |lambda'_y(0)| - 1` over pairs of doubly degenerate
/// zero-phase eigenvalues `x + y = E` with `|x| < |y|`.
fn tilt_for(table: &ExceptionalTable, e: f64, r: usize) -> f64 {
    let Some(pairs) = table.pairs_at(e) else {
        return DEFAULT_DELTA;
    };
    let cos2 = |i: usize| 2.0 * (std::f64::consts::PI * i as f64 / r as f64).cos();
    let interior_even = |i: usize| i > 0 && i < r && i.is_multiple_of(2);
    let mut best = f64::INFINITY;
    for &(i, j) in pairs {
        if !(interior_even(i) && interior_even(j)) {
            continue;
        }
        let (x, y) = (cos2(i), cos2(j));
        let (small, large) = if x.abs() < y.abs() { (x, y) } else { (y, x) };
        if (small.abs() - large.abs()).abs() <= EXCEPTIONAL_TOL {
            continue;
        }
        let ratio = derivative_magnitude(small, r).expect("in range") / derivative_magnitude(large, r).expect("in range");
        best = best.min(ratio - 1.0);
    }
    if best.is_finite() {
        0.5 * best
    } else {
        DEFAULT_DELTA
    }
}

/// Exact structure of the zero eigenvalue at `(pi/2, 0)` on `odd`.
pub fn zero_energy_structure(odd: Period) -> (usize, usize) {
    let profile = multiplicity_profile(odd, SpecialPhase::HalfPi, SpecialPhase::Zero);
    let s = profile.iter().filter(|e| e.value < -EXCEPTIONAL_TOL).map(|e| e.multiplicity).sum();
    let zero = profile
        .iter()
        .find(|e| e.value.abs() <= EXCEPTIONAL_TOL)
        .map_or(0, |e| e.multiplicity);
    (s, zero)
}

fn certify_zero(energy: f64, odd: Period, attempts: &mut Vec<Attempt>) -> Option<InteriorCertificate> {
    let counter = FreeCounter::new(odd);
    let (s, zero_mult) = zero_energy_structure(odd);
    let half = std::f64::consts::FRAC_PI_2;
    for eps in epsilon_schedule() {
        let placeholder = CertificateRoute::ZeroEnergy {
            epsilon: eps,
            split: ZeroEnergySplit {
                s,
                t: zero_mult.saturating_sub(2) / 4,
                ell_minus: 0,
                ell_plus: 0,
            },
        };
        let a = phase(half - eps, 0.0);
        let b = phase(half + eps, 0.0);
        if let Some(mut c) = counter.try_pair(energy, a, b, placeholder, attempts) {
            if let CertificateRoute::ZeroEnergy { split, .. } = &mut c.route {
                split.ell_minus = c.count_a as i64 - s as i64;
                split.ell_plus = c.count_b as i64 - s as i64;
            }
            return Some(c);
        }
    }
    None
}

/// Recomputes both fibers with the dense solver and confirms the counts and
/// `lambda_w(larger count) < E < lambda_w(smaller count)`.
pub fn recheck_certificate(cert: &InteriorCertificate, opts: &EigenOptions) -> Result<bool> {
    let v = Potential::zero(cert.period);
    let solve = |ph: BlochPhase| {
        let f = build_fiber_at(&v, ph.theta(), ph.phi());
        hermitian_eigenvalues_with(&f.matrix, opts)
    };
    let a = solve(cert.phase_a)?;
    let b = solve(cert.phase_b)?;
    let count = |vals: &[f64], r: f64| {
        let c = vals.partition_point(|&x| x < cert.energy);
        let clear = vals.iter().all(|x| (x - cert.energy).abs() > r);
        clear.then_some(c)
    };
    if count(&a.values, a.residual_bound) != Some(cert.count_a) || count(&b.values, b.residual_bound) != Some(cert.count_b) {
        return Ok(false);
    }
    let (low, high) = if cert.count_a < cert.count_b { (&a, &b) } else { (&b, &a) };
    let w = cert.witness_band - 1;
    Ok(cert.count_a != cert.count_b
        && w == cert.count_a.min(cert.count_b)
        && high.values[w] + high.residual_bound < cert.energy
        && cert.energy < low.values[w] - low.residual_bound)
}
