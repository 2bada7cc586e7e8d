//! Periods of the square lattice and Bloch phases.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// A lattice period `(p, q)`: `p` along the first (horizontal) index `n`,
/// `q` along the second (vertical) index `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PeriodRepr", into = "PeriodRepr")]
pub struct Period {
    p: usize,
    q: usize,
}

#[derive(Serialize, Deserialize)]
struct PeriodRepr {
    p: usize,
    q: usize,
}

impl TryFrom<PeriodRepr> for Period {
    type Error = Error;
    fn try_from(r: PeriodRepr) -> Result<Self> {
        Period::new(r.p, r.q)
    }
}

impl From<Period> for PeriodRepr {
    fn from(p: Period) -> Self {
        PeriodRepr { p: p.p, q: p.q }
    }
}

impl Period {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidArgument(format!(
                "period components must be positive, got ({p}, {q})"
            )));
        }
        Ok(Self { p, q })
    }

    /// Equal periods `(r, r)`.
    pub fn square(r: usize) -> Result<Self> {
        Self::new(r, r)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Number of sites in the fundamental domain, i.e. the fiber dimension.
    pub fn cells(&self) -> usize {
        self.p * self.q
    }

    pub fn has_odd(&self) -> bool {
        self.p % 2 == 1 || self.q % 2 == 1
    }

    pub fn both_even(&self) -> bool {
        !self.has_odd()
    }

    /// `(r, r)` with `r = lcm(p, q, 2)`.
    pub fn normalized_even(&self) -> Period {
        let r = lcm(lcm(self.p, self.q), 2);
        Period { p: r, q: r }
    }

    /// The period used for the zero-energy argument when some period is odd.
    ///
    /// Returns `(p, lcm(q, 4))` when `p` is odd, otherwise `(lcm(p, 4), q)`,
    /// with the coordinates swapped so the odd period comes first. Swapping
    /// the two axes leaves the bands unchanged. `None` when both are even.
    pub fn normalized_odd(&self) -> Option<Period> {
        if self.p % 2 == 1 {
            Some(Period {
                p: self.p,
                q: lcm(self.q, 4),
            })
        } else if self.q % 2 == 1 {
            Some(Period {
                p: self.q,
                q: lcm(self.p, 4),
            })
        } else {
            None
        }
    }

    /// Componentwise divisibility `self | other`.
    pub fn divides(&self, other: &Period) -> bool {
        other.p.is_multiple_of(self.p) && other.q.is_multiple_of(self.q)
    }

    pub fn swapped(&self) -> Period {
        Period {
            p: self.q,
            q: self.p,
        }
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.p, self.q)
    }
}

impl FromStr for Period {
    type Err = Error;

    /// Parses `PxQ`, e.g. `5x4`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected period of the form PxQ, got {s:?}"));
        let (a, b) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
        let p = a.trim().parse::<usize>().map_err(|_| bad())?;
        let q = b.trim().parse::<usize>().map_err(|_| bad())?;
        Period::new(p, q)
    }
}

/// A point `(theta, phi)` of the reduced Brillouin zone `[0, pi]^2`.
///
/// `theta` twists the boundary in the `p` direction, `phi` in the `q`
/// direction. Phases outside the square must be folded by the caller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochPhase {
    theta: f64,
    phi: f64,
}

impl BlochPhase {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        for (name, v) in [("theta", theta), ("phi", phi)] {
            if !(0.0..=PI).contains(&v) {
                return Err(Error::InvalidArgument(format!(
                    "{name} = {v} lies outside [0, pi]"
                )));
            }
        }
        Ok(Self { theta, phi })
    }

    /// Phases given in units of pi, so `(0.5, 0.0)` is `(pi/2, 0)`.
    pub fn from_pi_units(theta: f64, phi: f64) -> Result<Self> {
        Self::new(theta * PI, phi * PI)
    }

    pub const ZERO: BlochPhase = BlochPhase {
        theta: 0.0,
        phi: 0.0,
    };

    pub const PI_PI: BlochPhase = BlochPhase { theta: PI, phi: PI };

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn in_pi_units(&self) -> (f64, f64) {
        (self.theta / PI, self.phi / PI)
    }

    /// Point `(i, k)` of the uniform `resolution x resolution` grid on
    /// `[0, pi]^2`, corners included.
    pub fn grid_point(i: usize, k: usize, resolution: usize) -> BlochPhase {
        let at = |j: usize| {
            if j + 1 == resolution {
                PI
            } else {
                PI * j as f64 / (resolution - 1) as f64
            }
        };
        BlochPhase {
            theta: at(i),
            phi: at(k),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PhaseRepr {
    theta_pi: f64,
    phi_pi: f64,
}

impl Serialize for BlochPhase {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (theta_pi, phi_pi) = self.in_pi_units();
        PhaseRepr { theta_pi, phi_pi }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BlochPhase {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PhaseRepr::deserialize(d)?;
        BlochPhase::from_pi_units(r.theta_pi, r.phi_pi).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizations() {
        let p = Period::new(5, 4).unwrap();
        assert_eq!(p.normalized_even(), Period::square(20).unwrap());
        assert_eq!(p.normalized_odd(), Some(Period::new(5, 4).unwrap()));
        let p = Period::new(3, 2).unwrap();
        assert_eq!(p.normalized_odd(), Some(Period::new(3, 4).unwrap()));
        let p = Period::new(6, 9).unwrap();
        assert_eq!(p.normalized_odd(), Some(Period::new(9, 12).unwrap()));
        assert_eq!(Period::new(8, 10).unwrap().normalized_odd(), None);
        assert_eq!(
            Period::new(1, 1).unwrap().normalized_even(),
            Period::square(2).unwrap()
        );
    }

    #[test]
    fn normalized_even_is_idempotent_and_divisible() {
        for p in 1..=12 {
            for q in 1..=12 {
                let per = Period::new(p, q).unwrap();
                let r = per.normalized_even();
                assert_eq!(r.normalized_even(), r);
                assert_eq!(r.p() % 2, 0);
                assert!(per.divides(&r));
                if let Some(o) = per.normalized_odd() {
                    assert_eq!(o.p() % 2, 1);
                    assert_eq!(o.q() % 4, 0);
                }
            }
        }
    }

    #[test]
    fn parse_period() {
        assert_eq!("5x4".parse::<Period>().unwrap(), Period::new(5, 4).unwrap());
        assert!("5by4".parse::<Period>().is_err());
        assert!("0x4".parse::<Period>().is_err());
    }

    #[test]
    fn phase_range() {
        assert!(BlochPhase::new(-0.1, 0.0).is_err());
        assert!(BlochPhase::new(0.0, 3.2).is_err());
        let g = BlochPhase::grid_point(4, 0, 5);
        assert_eq!(g.theta(), PI);
        assert_eq!(BlochPhase::from_pi_units(1.0, 1.0).unwrap(), BlochPhase::PI_PI);
    }
}
