//! The one-dimensional twisted Laplacian: the `r x r` matrix of the discrete
//! Laplacian on a ring of `r` sites whose wrap-around hop carries the phase
//! `exp(i theta)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Num;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sorted spectrum of the twisted Laplacian at one phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwistedLaplacianSpectrum {
    pub r: usize,
    pub theta: f64,
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueWithMultiplicity {
    pub value: f64,
    pub multiplicity: usize,
}

/// Phases at which the spectrum has closed-form multiplicities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpecialPhase {
    Zero,
    HalfPi,
    Pi,
}

impl SpecialPhase {
    pub fn radians(self) -> f64 {
        match self {
            SpecialPhase::Zero => 0.0,
            SpecialPhase::HalfPi => PI / 2.0,
            SpecialPhase::Pi => PI,
        }
    }
}

/// Dense row-major matrix of the twisted Laplacian.
///
/// For `r >= 3` this is the ring adjacency with `exp(-i theta)` at
/// `(0, r-1)` and `exp(i theta)` at `(r-1, 0)`. The small rings are
/// special: `r = 1` gives `[2 cos theta]`, and `r = 2` has off-diagonal
/// `1 + exp(-/+ i theta)`.
pub fn twisted_laplacian_matrix(r: usize, theta: f64) -> Vec<Complex64> {
    assert!(r >= 1, "ring length must be positive");
    let mut a = vec![Complex64::new(0.0, 0.0); r * r];
    let tw = Complex64::new(theta.cos(), theta.sin());
    match r {
        1 => a[0] = Complex64::new(2.0 * theta.cos(), 0.0),
        2 => {
            let up = Complex64::new(1.0, 0.0) + tw.conj();
            a[1] = up;
            a[2] = up.conj();
        }
        _ => {
            for i in 0..r - 1 {
                a[i * r + i + 1] = Complex64::new(1.0, 0.0);
                a[(i + 1) * r + i] = Complex64::new(1.0, 0.0);
            }
            a[r - 1] = tw.conj();
            a[(r - 1) * r] = tw;
        }
    }
    a
}

/// Eigenvalues `2 cos((theta + 2 pi k) / r)`, `k = 0..r`, ascending.
///
/// Equal values keep Bloch-index order. Valid for any real `theta`.
pub fn eigenvalues_1d(r: usize, theta: f64) -> TwistedLaplacianSpectrum {
    assert!(r >= 1, "ring length must be positive");
    let mut eigenvalues: Vec<f64> = (0..r)
        .map(|k| 2.0 * ((theta + 2.0 * PI * k as f64) / r as f64).cos())
        .collect();
    eigenvalues.sort_by(|a, b| a.total_cmp(b));
    TwistedLaplacianSpectrum {
        r,
        theta,
        eigenvalues,
    }
}

/// Distinct eigenvalues with exact multiplicities at `0`, `pi/2`, `pi`.
///
/// At `0` the values are `2 cos(pi j / r)` for even `j` in `0..=r`; at `pi`
/// the odd `j`. In both cases `+-2` are simple and the rest double. At
/// `pi/2` the values `2 cos(pi j / 2r)`, `j` odd in `0..2r`, are all simple.
pub fn special_spectrum(r: usize, phase: SpecialPhase) -> Vec<EigenvalueWithMultiplicity> {
    assert!(r >= 1, "ring length must be positive");
    let mut out: Vec<EigenvalueWithMultiplicity> = match phase {
        SpecialPhase::Zero | SpecialPhase::Pi => {
            let parity = usize::from(phase == SpecialPhase::Pi);
            (0..=r)
                .filter(|j| j % 2 == parity)
                .map(|j| EigenvalueWithMultiplicity {
                    value: 2.0 * (PI * j as f64 / r as f64).cos(),
                    multiplicity: if j == 0 || j == r { 1 } else { 2 },
                })
                .collect()
        }
        SpecialPhase::HalfPi => (0..2 * r)
            .filter(|j| j % 2 == 1)
            .map(|j| EigenvalueWithMultiplicity {
                value: 2.0 * (PI * j as f64 / (2 * r) as f64).cos(),
                multiplicity: 1,
            })
            .collect(),
    };
    out.sort_by(|a, b| a.value.total_cmp(&b.value));
    out
}

/// Trace of the `r`-th power of the transfer matrix `[[z, -1], [1, 0]]`.
///
/// Uses `t_{k+1} = z t_k - t_{k-1}` with `t_0 = 2`, `t_1 = z`, the
/// Cayley-Hamilton recurrence for traces of powers of a unimodular matrix.
pub fn discriminant<T: Num + Copy>(z: T, r: usize) -> T {
    let two = T::one() + T::one();
    let (mut prev, mut cur) = (two, z);
    if r == 0 {
        return two;
    }
    for _ in 1..r {
        let next = z * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Complex-energy convenience wrapper around [`discriminant`].
pub fn discriminant_complex(z: Complex64, r: usize) -> Complex64 {
    discriminant(z, r)
}

/// `|lambda_j'|` at the phases `0` and `pi`: `sqrt(4 - lambda^2) / r`.
pub fn derivative_magnitude(lambda: f64, r: usize) -> Result<f64> {
    assert!(r >= 1, "ring length must be positive");
    // allow a few ulps of slack so computed values of +-2 are accepted
    if !lambda.is_finite() || lambda.abs() > 2.0 + 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "energy {lambda} lies outside [-2, 2]"
        )));
    }
    let l = lambda.clamp(-2.0, 2.0);
    Ok((4.0 - l * l).max(0.0).sqrt() / r as f64)
}

/// Sign of `lambda_j'` on `(0, pi)` for `j = 1..=r` (entry `j - 1`).
///
/// `(-1)^(r-j) lambda_j' < 0`, so the top branch decreases and the
/// directions alternate going down.
pub fn derivative_signs(r: usize) -> Vec<i8> {
    (1..=r)
        .map(|j| if (r - j).is_multiple_of(2) { -1 } else { 1 })
        .collect()
}
