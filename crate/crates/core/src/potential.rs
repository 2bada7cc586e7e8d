//! Periodic potentials on one fundamental domain, and their file formats.
//!
//! JSON: `{"p": int, "q": int, "values": [[float; q]; p]}`, entry
//! `values[n][m]` is `V(n, m)`. CSV: `p` lines of `q` comma-separated
//! floats; lines starting with `#` are comments.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Period;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialFormat {
    Json,
    Csv,
}

impl PotentialFormat {
    /// Guess from a file extension; anything other than `.csv` is JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => PotentialFormat::Csv,
            _ => PotentialFormat::Json,
        }
    }
}

impl FromStr for PotentialFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(PotentialFormat::Json),
            "csv" => Ok(PotentialFormat::Csv),
            other => Err(Error::Parse(format!("unknown potential format {other:?}"))),
        }
    }
}

/// One fundamental domain of a periodic potential, stored row-major with
/// `n` (range `0..p`) as the outer index and `m` (range `0..q`) inner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PotentialFile", into = "PotentialFile")]
pub struct Potential {
    period: Period,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct PotentialFile {
    p: usize,
    q: usize,
    values: Vec<Vec<f64>>,
}

impl TryFrom<PotentialFile> for Potential {
    type Error = Error;
    fn try_from(f: PotentialFile) -> Result<Self> {
        let period = Period::new(f.p, f.q)?;
        Potential::from_rows(period, &f.values)
    }
}

impl From<Potential> for PotentialFile {
    fn from(v: Potential) -> Self {
        PotentialFile {
            p: v.period.p(),
            q: v.period.q(),
            values: v.rows(),
        }
    }
}

impl Potential {
    /// Builds from a flat row-major buffer of length `p * q`.
    pub fn new(period: Period, values: Vec<f64>) -> Result<Self> {
        if values.len() != period.cells() {
            return Err(Error::DimensionMismatch(format!(
                "period {period} needs {} values, got {}",
                period.cells(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                n: i / period.q(),
                m: i % period.q(),
            });
        }
        Ok(Self { period, values })
    }

    pub fn from_rows(period: Period, rows: &[Vec<f64>]) -> Result<Self> {
        if rows.len() != period.p() {
            return Err(Error::DimensionMismatch(format!(
                "period {period} needs {} rows, got {}",
                period.p(),
                rows.len()
            )));
        }
        for (n, row) in rows.iter().enumerate() {
            if row.len() != period.q() {
                return Err(Error::DimensionMismatch(format!(
                    "row {n} has {} entries, expected {}",
                    row.len(),
                    period.q()
                )));
            }
        }
        Self::new(period, rows.concat())
    }

    pub fn zero(period: Period) -> Self {
        Self {
            period,
            values: vec![0.0; period.cells()],
        }
    }

    pub fn constant(period: Period, c: f64) -> Result<Self> {
        Self::new(period, vec![c; period.cells()])
    }

    /// `delta * (-1)^(n+m)` on the 2x2 cell.
    pub fn checkerboard(delta: f64) -> Result<Self> {
        let period = Period::square(2)?;
        Self::new(period, vec![delta, -delta, -delta, delta])
    }

    /// Independent uniform entries on `[-1, 1]`, rescaled so the sup norm
    /// equals `sup_norm` exactly.
    pub fn random<R: Rng + ?Sized>(period: Period, sup_norm: f64, rng: &mut R) -> Result<Self> {
        if !(sup_norm >= 0.0 && sup_norm.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "sup norm must be finite and nonnegative, got {sup_norm}"
            )));
        }
        let raw: Vec<f64> = (0..period.cells())
            .map(|_| rng.random_range(-1.0..=1.0))
            .collect();
        let max = raw.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let scale = if max > 0.0 { sup_norm / max } else { 0.0 };
        Self::new(period, raw.into_iter().map(|v| v * scale).collect())
    }

    pub fn period(&self) -> Period {
        self.period
    }

    /// `V(n, m)` for `(n, m)` in the fundamental domain.
    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.values[n * self.period.q() + m]
    }

    /// `V(n, m)` for arbitrary lattice coordinates, using periodicity.
    pub fn at(&self, n: i64, m: i64) -> f64 {
        let p = self.period.p() as i64;
        let q = self.period.q() as i64;
        self.get(n.rem_euclid(p) as usize, m.rem_euclid(q) as usize)
    }

    /// Values in vectorization order: index `n * q + m`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values
            .chunks(self.period.q())
            .map(|c| c.to_vec())
            .collect()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.period, self.values.iter().map(|v| v * factor).collect())
    }

    /// The same potential viewed as `target`-periodic; requires
    /// `period | target`.
    pub fn retile(&self, target: Period) -> Result<Self> {
        if !self.period.divides(&target) {
            return Err(Error::NotNested(format!(
                "{} does not divide {target}",
                self.period
            )));
        }
        let mut values = Vec::with_capacity(target.cells());
        for n in 0..target.p() {
            for m in 0..target.q() {
                values.push(self.get(n % self.period.p(), m % self.period.q()));
            }
        }
        Ok(Self {
            period: target,
            values,
        })
    }

    /// Exchanges the roles of the two lattice axes.
    pub fn transposed(&self) -> Self {
        let per = self.period.swapped();
        let mut values = Vec::with_capacity(per.cells());
        for m in 0..self.period.q() {
            for n in 0..self.period.p() {
                values.push(self.get(n, m));
            }
        }
        Self {
            period: per,
            values,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("potential serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# p={} q={}\n", self.period.p(), self.period.q());
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn parse_potential_json(text: &str) -> Result<Potential> {
    serde_json::from_str::<Potential>(text).map_err(|e| {
        // try_from errors come back wrapped as serde messages
        let msg = e.to_string();
        if msg.starts_with("dimension mismatch") {
            Error::DimensionMismatch(msg)
        } else {
            Error::Parse(msg)
        }
    })
}

pub fn parse_potential_csv(text: &str) -> Result<Potential> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|tok| {
                tok.trim().parse::<f64>().map_err(|_| {
                    Error::Parse(format!("line {}: cannot parse {:?}", lineno + 1, tok.trim()))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    let p = rows.len();
    let q = rows.first().map(|r| r.len()).unwrap_or(0);
    if p == 0 || q == 0 {
        return Err(Error::Parse("CSV potential has no values".into()));
    }
    Potential::from_rows(Period::new(p, q)?, &rows)
}

/// Reads a potential from disk.
pub fn load_potential(path: impl AsRef<Path>, format: PotentialFormat) -> Result<Potential> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    match format {
        PotentialFormat::Json => parse_potential_json(&text),
        PotentialFormat::Csv => parse_potential_csv(&text),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_zero() {
        let v = parse_potential_json(r#"{"p":1,"q":1,"values":[[0.0]]}"#).unwrap();
        assert_eq!(v.period(), Period::new(1, 1).unwrap());
        assert!(v.is_zero());
        assert_eq!(v.sup_norm(), 0.0);
    }

    #[test]
    fn json_checkerboard() {
        let d = 0.3;
        let v = parse_potential_json(r#"{"p":2,"q":2,"values":[[0.3,-0.3],[-0.3,0.3]]}"#).unwrap();
        for n in -3i64..3 {
            for m in -3i64..3 {
                let expect = d * if (n + m).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                assert_eq!(v.at(n, m), expect);
            }
        }
        assert_eq!(v, Potential::checkerboard(0.3).unwrap());
    }

    #[test]
    fn json_declared_dims_must_match() {
        let err = parse_potential_json(r#"{"p":2,"q":2,"values":[[0.0,1.0]]}"#).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)), "{err}");
        let err = parse_potential_json(r#"{"p":1,"q":2,"values":[[0.0]]}"#).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)), "{err}");
        assert!(parse_potential_json("{not json").is_err());
    }

    #[test]
    fn csv_ragged_rows() {
        let err = parse_potential_csv("1,2\n3,4\n5,6,7\n").unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)), "{err}");
    }

    #[test]
    fn csv_with_header() {
        let v = parse_potential_csv("# a header\n1, 2, 3\n4,5,6\n").unwrap();
        assert_eq!(v.period(), Period::new(2, 3).unwrap());
        assert_eq!(v.get(1, 2), 6.0);
        assert_eq!(v.get(0, 1), 2.0);
        let back = parse_potential_csv(&v.to_csv()).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn csv_non_finite() {
        let err = parse_potential_csv("1,NaN\n").unwrap_err();
        assert!(matches!(err, Error::NonFinite { n: 0, m: 1 }), "{err}");
        assert!(parse_potential_csv("1,abc\n").is_err());
    }

    #[test]
    fn retile_keeps_norm_and_values() {
        let v = Potential::new(Period::new(2, 3).unwrap(), vec![1.0, -2.0, 0.5, 0.0, 3.0, -0.25])
            .unwrap();
        let t = v.retile(Period::new(4, 9).unwrap()).unwrap();
        assert_eq!(t.sup_norm(), v.sup_norm());
        for n in 0..4 {
            for m in 0..9 {
                assert_eq!(t.get(n, m), v.at(n as i64, m as i64));
            }
        }
        assert!(v.retile(Period::new(3, 3).unwrap()).is_err());
        let tt = v.transposed();
        assert_eq!(tt.get(2, 1), v.get(1, 2));
    }

    #[test]
    fn load_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.json");
        let v = Potential::checkerboard(0.5).unwrap();
        fs::write(&path, v.to_json()).unwrap();
        assert_eq!(load_potential(&path, PotentialFormat::Json).unwrap(), v);
        assert!(matches!(
            load_potential(dir.path().join("missing.json"), PotentialFormat::Json),
            Err(Error::Io { .. })
        ));
    }
}
