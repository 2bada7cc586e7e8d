//! Exceptional energies `C_r + C_r`, `C_r = {2 cos(pi j / r) : 0 <= j <= r}`:
//! the union of the corner spectra of the free Laplacian on `(r, r)`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::cyclotomic::{CosineRing, ExactKey};
use crate::error::{Error, Result};

/// Distance below which a floating energy is identified with an element of
/// the exceptional set.
pub const EXCEPTIONAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalSet {
    pub r: usize,
    pub values: Vec<f64>,
}

impl ExceptionalSet {
    /// Distance from `e` to the nearest exceptional energy.
    pub fn distance(&self, e: f64) -> f64 {
        let k = self.values.partition_point(|&x| x < e);
        let mut d = f64::INFINITY;
        if k > 0 {
            d = d.min(e - self.values[k - 1]);
        }
        if k < self.values.len() {
            d = d.min(self.values[k] - e);
        }
        d
    }

    pub fn contains(&self, e: f64) -> bool {
        self.distance(e) <= EXCEPTIONAL_TOL
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn exceptional_energies(r: usize) -> Result<ExceptionalSet> {
    Ok(ExceptionalTable::new(r)?.set())
}

/// Exceptional energies with the index pairs producing each of them.
#[derive(Debug, Clone)]
pub(crate) struct ExceptionalTable {
    r: usize,
    /// `(value, pairs (i, j) with i <= j)` sorted by value.
    entries: Vec<(f64, Vec<(usize, usize)>)>,
}

impl ExceptionalTable {
    pub(crate) fn new(r: usize) -> Result<Self> {
        if r < 2 || !r.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "exceptional energies need an even r >= 2, got {r}"
            )));
        }
        let ring = CosineRing::new(r);
        let mut groups: HashMap<ExactKey, (f64, Vec<(usize, usize)>)> = HashMap::new();
        for i in 0..=r {
            for j in i..=r {
                let key = ring.cos_sum(&[i as i64, j as i64]);
                let value = ring.value(i as i64) + ring.value(j as i64);
                groups.entry(key).or_insert((value, Vec::new())).1.push((i, j));
            }
        }
        let mut entries: Vec<_> = groups.into_values().collect();
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self { r, entries })
    }

    pub(crate) fn set(&self) -> ExceptionalSet {
        ExceptionalSet {
            r: self.r,
            values: self.entries.iter().map(|e| e.0).collect(),
        }
    }

    /// Index pairs of the exceptional energy matching `e`, if any.
    pub(crate) fn pairs_at(&self, e: f64) -> Option<&[(usize, usize)]> {
        let k = self.entries.partition_point(|x| x.0 < e);
        [k.wrapping_sub(1), k]
            .into_iter()
            .filter_map(|i| self.entries.get(i))
            .find(|x| (x.0 - e).abs() <= EXCEPTIONAL_TOL)
            .map(|x| x.1.as_slice())
    }
}
