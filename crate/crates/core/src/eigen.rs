//! Eigenvalues of dense complex Hermitian matrices.
//!
//! Householder reflections reduce the matrix to a real symmetric
//! tridiagonal one, implicit QL with Wilkinson shifts diagonalizes that, and
//! every returned eigenvalue is then checked by inverse iteration on the
//! tridiagonal factor. The residual bound combines the worst inverse
//! iteration residual with the backward error of the reduction.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entrywise tolerance on `a_ij - conj(a_ji)` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Default relative accuracy demanded of a solve.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    /// The solve fails when `residual_bound > tolerance * ||M||_F`.
    pub tolerance: f64,
    /// QL sweeps allowed per eigenvalue before giving up.
    pub max_iterations: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: 60,
        }
    }
}

impl EigenOptions {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self {
            tolerance,
            ..Self::default()
        }
    }
}

/// Dense Hermitian matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Checks the Hermitian property to [`HERMITIAN_TOL`].
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "{n}x{n} matrix needs {} entries, got {}",
                n * n,
                data.len()
            )));
        }
        for i in 0..n {
            for j in i..n {
                let a = data[i * n + j];
                let b = data[j * n + i];
                if !(a.re.is_finite() && a.im.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "non-finite matrix entry at ({i}, {j})"
                    )));
                }
                let dev = (a - b.conj()).norm();
                if !(dev <= HERMITIAN_TOL) {
                    return Err(Error::NotHermitian {
                        row: i,
                        col: j,
                        deviation: dev,
                    });
                }
            }
        }
        Ok(Self { n, data })
    }

    /// Trusted constructor for matrices Hermitian by construction.
    pub(crate) fn from_hermitian_parts(n: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.data[i * self.n + i].re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `||M v - lambda v||` for a vector `v`.
    pub fn residual(&self, lambda: f64, v: &[Complex64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let mut s = -v[i] * lambda;
            for (a, x) in row.iter().zip(v) {
                s += a * x;
            }
            acc += s.norm_sqr();
        }
        acc.sqrt()
    }
}

/// Ascending eigenvalues with multiplicity and an a posteriori bound.
///
/// For each value `lambda` there is a unit vector `v` with
/// `||M v - lambda v|| <= residual_bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueList {
    pub values: Vec<f64>,
    pub residual_bound: f64,
}

pub fn hermitian_eigenvalues(m: &HermitianMatrix) -> Result<EigenvalueList> {
    hermitian_eigenvalues_with(m, &EigenOptions::default())
}

pub fn hermitian_eigenvalues_with(m: &HermitianMatrix, opts: &EigenOptions) -> Result<EigenvalueList> {
    let n = m.n;
    if n == 0 {
        return Ok(EigenvalueList {
            values: Vec::new(),
            residual_bound: 0.0,
        });
    }
    let fro = m.frobenius_norm();
    let (diag, offdiag) = tridiagonalize(m);

    let mut d = diag.clone();
    let mut e = offdiag.clone();
    e.push(0.0);
    ql_implicit(&mut d, &mut e, opts.max_iterations)?;
    d.sort_by(|a, b| a.total_cmp(b));

    let tnorm = tridiagonal_norm(&diag, &offdiag);
    let worst = d
        .iter()
        .map(|&lam| inverse_iteration_residual(&diag, &offdiag, lam, tnorm))
        .fold(0.0f64, f64::max);
    let reduction = 2.0 * n as f64 * f64::EPSILON * fro;
    let residual_bound = worst + reduction;

    if residual_bound > opts.tolerance * fro.max(f64::MIN_POSITIVE) {
        return Err(Error::Inaccurate {
            bound: residual_bound,
            tolerance: opts.tolerance,
        });
    }
    Ok(EigenvalueList {
        values: d,
        residual_bound,
    })
}

/// Unitary reduction to a real symmetric tridiagonal matrix.
///
/// Returns the diagonal and the moduli of the subdiagonal; a diagonal
/// unitary similarity removes the subdiagonal phases.
fn tridiagonalize(m: &HermitianMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.n;
    let mut a = m.data.clone();
    let mut sub = Vec::with_capacity(n.saturating_sub(1));
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    let mut p = vec![Complex64::new(0.0, 0.0); n];

    for k in 0..n.saturating_sub(1) {
        let len = n - k - 1;
        let x0 = a[(k + 1) * n + k];
        let tail: f64 = (1..len).map(|i| a[(k + 1 + i) * n + k].norm_sqr()).sum();
        if tail == 0.0 {
            sub.push(x0.norm());
            continue;
        }
        let sigma = (x0.norm_sqr() + tail).sqrt();
        let x0abs = x0.norm();
        let phase = if x0abs > 0.0 {
            x0 / x0abs
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * sigma;

        let v = &mut v[..len];
        for (i, vi) in v.iter_mut().enumerate() {
            *vi = a[(k + 1 + i) * n + k];
        }
        v[0] -= alpha;
        let tau = 1.0 / (sigma * (sigma + x0abs));

        // p = tau * A22 v
        let p = &mut p[..len];
        for i in 0..len {
            let row = &a[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + n];
            let mut s = Complex64::new(0.0, 0.0);
            for (aij, vj) in row.iter().zip(v.iter()) {
                s += aij * vj;
            }
            p[i] = s * tau;
        }
        // w = p - (tau/2)(v^H p) v, stored in p
        let mut vhp = Complex64::new(0.0, 0.0);
        for (vi, pi) in v.iter().zip(p.iter()) {
            vhp += vi.conj() * pi;
        }
        let kk = 0.5 * tau * vhp.re;
        for (pi, vi) in p.iter_mut().zip(v.iter()) {
            *pi -= vi * kk;
        }
        // A22 -= v w^H + w v^H
        for i in 0..len {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut a[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + n];
            for (j, aij) in row.iter_mut().enumerate() {
                *aij -= vi * p[j].conj() + wi * v[j].conj();
            }
        }
        sub.push(sigma);
    }
    let diag = (0..n).map(|i| a[i * n + i].re).collect();
    (diag, sub)
}

/// Implicit QL with Wilkinson shifts, eigenvalues only.
///
/// `e[i]` couples `i` and `i + 1`; `e[n - 1]` must be zero on entry.
/// Off-diagonals below `eps * max(|d_m| + |d_m+1|, ||T||)` are treated as
/// zero; the absolute floor keeps clusters of tiny eigenvalues from stalling.
fn ql_implicit(d: &mut [f64], e: &mut [f64], max_iterations: usize) -> Result<()> {
    let n = d.len();
    let floor = tridiagonal_norm(d, e);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd.max(floor) || e[m].abs() < f64::MIN_POSITIVE {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > max_iterations {
                return Err(Error::NoConvergence {
                    index: l,
                    iterations: max_iterations,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated_early = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated_early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated_early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

fn tridiagonal_norm(d: &[f64], e: &[f64]) -> f64 {
    // max row sum bounds the 2-norm
    (0..d.len())
        .map(|i| {
            let left = if i > 0 { e[i - 1].abs() } else { 0.0 };
            let right = e.get(i).map_or(0.0, |x| x.abs());
            d[i].abs() + left + right
        })
        .fold(0.0f64, f64::max)
}

/// Residual `||(T - lambda) x||` of two steps of inverse iteration.
fn inverse_iteration_residual(d: &[f64], e: &[f64], lambda: f64, tnorm: f64) -> f64 {
    let n = d.len();
    if n == 1 {
        return (d[0] - lambda).abs();
    }
    let lu = TridiagonalLu::factor(d, e, lambda, tnorm);
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.37 * ((i as f64) * 1.618).sin()).collect();
    let mut best = f64::INFINITY;
    for _ in 0..3 {
        lu.solve(&mut x);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            break;
        }
        x.iter_mut().for_each(|v| *v /= norm);
        let mut acc = 0.0;
        for i in 0..n {
            let mut s = (d[i] - lambda) * x[i];
            if i > 0 {
                s += e[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += e[i] * x[i + 1];
            }
            acc += s * s;
        }
        best = best.min(acc.sqrt());
    }
    best
}

/// LU with partial pivoting of a shifted symmetric tridiagonal matrix.
struct TridiagonalLu {
    dl: Vec<f64>,
    dd: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    fn factor(d: &[f64], e: &[f64], lambda: f64, tnorm: f64) -> Self {
        let n = d.len();
        let mut dl = e.to_vec();
        let mut dd: Vec<f64> = d.iter().map(|v| v - lambda).collect();
        let mut du = e.to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n - 1];
        for i in 0..n - 1 {
            if dd[i].abs() >= dl[i].abs() {
                if dd[i] != 0.0 {
                    let fact = dl[i] / dd[i];
                    dl[i] = fact;
                    dd[i + 1] -= fact * du[i];
                } else {
                    dl[i] = 0.0;
                }
            } else {
                let fact = dd[i] / dl[i];
                dd[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = dd[i + 1];
                dd[i + 1] = temp - fact * dd[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        let floor = f64::EPSILON * tnorm.max(f64::MIN_POSITIVE);
        for v in dd.iter_mut() {
            if v.abs() < floor {
                *v = if *v < 0.0 { -floor } else { floor };
            }
        }
        Self {
            dl,
            dd,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                let t = b[i];
                b[i] = b[i + 1];
                b[i + 1] = t - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.dd[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.dd[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.dd[i];
        }
    }
}
