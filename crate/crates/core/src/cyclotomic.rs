//! Exact equality of sums of `2 cos(pi k / M)`.
//!
//! With `z = exp(i pi / M)` a primitive `2M`-th root of unity,
//! `2 cos(pi k / M) = z^k + z^-k`. Sums of such terms live in `Z[z]`, which
//! is `Z[x]` modulo the cyclotomic polynomial `Phi_{2M}`; reducing modulo
//! that monic polynomial gives a canonical integer coefficient vector, so
//! two sums are equal exactly when their reduced vectors are equal. This
//! catches coincidences such as `cos(pi/5) + cos(3pi/5) = cos(pi/3) +
//! cos(pi/2)` that index bookkeeping alone would miss.

use std::collections::HashMap;

/// Coefficients of `Phi_n`, lowest degree first.
pub fn cyclotomic_polynomial(n: usize) -> Vec<i64> {
    assert!(n >= 1);
    let mut memo: HashMap<usize, Vec<i64>> = HashMap::new();
    cyclo(n, &mut memo)
}

fn cyclo(n: usize, memo: &mut HashMap<usize, Vec<i64>>) -> Vec<i64> {
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by Phi_d for every proper divisor d
    let mut num = vec![0i64; n + 1];
    num[0] = -1;
    num[n] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let div = cyclo(d, memo);
            num = exact_div(&num, &div);
        }
    }
    memo.insert(n, num.clone());
    num
}

/// Exact division by a monic polynomial.
fn exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    debug_assert_eq!(den[dn], 1);
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut quot = vec![0i64; qlen];
    for k in (0..qlen).rev() {
        let c = rem[k + dn];
        quot[k] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[k + j] -= c * d;
            }
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0), "division not exact");
    quot
}

/// Canonical representative of an element of `Z[exp(i pi / M)]`.
pub type ExactKey = Vec<i64>;

/// Reduced powers of `z = exp(i pi / M)` for building exact cosine sums.
#[derive(Debug, Clone)]
pub struct CosineRing {
    denominator: usize,
    powers: Vec<ExactKey>,
}

impl CosineRing {
    /// Ring for angles `pi k / denominator`.
    pub fn new(denominator: usize) -> Self {
        assert!(denominator >= 1);
        let order = 2 * denominator;
        let modulus = cyclotomic_polynomial(order);
        let deg = modulus.len() - 1;
        let mut powers = Vec::with_capacity(order);
        // x^k reduced mod Phi: shift the previous power and fold the top
        let mut cur = vec![0i64; deg];
        cur[0] = 1;
        for _ in 0..order {
            powers.push(cur.clone());
            let top = cur[deg - 1];
            for j in (1..deg).rev() {
                cur[j] = cur[j - 1];
            }
            cur[0] = 0;
            if top != 0 {
                for j in 0..deg {
                    cur[j] -= top * modulus[j];
                }
            }
        }
        Self {
            denominator,
            powers,
        }
    }

    pub fn denominator(&self) -> usize {
        self.denominator
    }

    fn power(&self, k: i64) -> &ExactKey {
        let n = self.powers.len() as i64;
        &self.powers[k.rem_euclid(n) as usize]
    }

    /// Exact key of `2 cos(pi k / M)`.
    pub fn two_cos(&self, k: i64) -> ExactKey {
        let a = self.power(k);
        let b = self.power(-k);
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    /// Exact key of `sum_i 2 cos(pi k_i / M)`.
    pub fn cos_sum(&self, ks: &[i64]) -> ExactKey {
        let mut acc = vec![0i64; self.powers[0].len()];
        for &k in ks {
            for (a, (x, y)) in acc.iter_mut().zip(self.power(k).iter().zip(self.power(-k))) {
                *a += x + y;
            }
        }
        acc
    }

    pub fn zero(&self) -> ExactKey {
        vec![0; self.powers[0].len()]
    }

    /// Floating value of `2 cos(pi k / M)`.
    pub fn value(&self, k: i64) -> f64 {
        2.0 * (std::f64::consts::PI * k as f64 / self.denominator as f64).cos()
    }
}
