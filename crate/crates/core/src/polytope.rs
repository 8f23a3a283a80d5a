//! Polytopes `{x : Ax > b}` and their JSON document format.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// On-disk representation: `{"A": [[..], ..], "b": [..], "name": ".."}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeDoc {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

/// An open polytope `{x : Ax > b}` with `A` of full column rank.
///
/// Immutable after construction.
#[derive(Debug, Clone)]
pub struct Polytope {
    a: DMatrix<f64>,
    b: DVector<f64>,
    name: Option<String>,
}

impl Polytope {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        Self::with_rank_tol(a, b, crate::config::Tolerances::default().rank_tol)
    }

    pub fn with_rank_tol(a: DMatrix<f64>, b: DVector<f64>, rank_tol: f64) -> Result<Self> {
        let (m, n) = a.shape();
        if n == 0 {
            return Err(Error::InvalidInput("polytope dimension must be >= 1".into()));
        }
        if b.len() != m {
            return Err(Error::DimensionMismatch {
                what: "b",
                expected: m,
                found: b.len(),
            });
        }
        if m < n {
            return Err(Error::InvalidInput(format!(
                "need at least as many constraints as dimensions (m={m}, n={n})"
            )));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("A"));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("b"));
        }
        let sv = a.clone().svd(false, false).singular_values;
        let smax = sv.max();
        let rank = sv.iter().filter(|&&s| s > rank_tol * smax.max(f64::MIN_POSITIVE)).count();
        if rank < n {
            return Err(Error::RankDeficient { rank, n });
        }
        Ok(Self { a, b, name: None })
    }

    pub fn from_rows(rows: &[Vec<f64>], b: &[f64]) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::InvalidInput("constraint matrix has no rows".into()));
        }
        let n = rows[0].len();
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "row of A",
                    expected: n,
                    found: r.len(),
                });
            }
        }
        let a = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
        Self::new(a, DVector::from_column_slice(b))
    }

    pub fn from_doc(doc: &PolytopeDoc) -> Result<Self> {
        let mut p = Self::from_rows(&doc.a, &doc.b)?;
        p.name = doc.name.clone();
        Ok(p)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PolytopeDoc = serde_json::from_str(text)?;
        Self::from_doc(&doc)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Parse(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json(&text)
    }

    pub fn to_doc(&self) -> PolytopeDoc {
        PolytopeDoc {
            a: self.a.row_iter().map(|r| r.iter().copied().collect()).collect(),
            b: self.b.iter().copied().collect(),
            name: self.name.clone(),
        }
    }

    /// Box `∏ (lo_i, hi_i)` as `2n` rows `±e_i`.
    pub fn from_box(lo: &[f64], hi: &[f64]) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                what: "box bounds",
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if lo.iter().zip(hi).any(|(l, h)| !(l < h)) {
            return Err(Error::InvalidInput("box needs lo < hi in every coordinate".into()));
        }
        let n = lo.len();
        let mut a = DMatrix::zeros(2 * n, n);
        let mut b = DVector::zeros(2 * n);
        for i in 0..n {
            a[(2 * i, i)] = 1.0;
            b[2 * i] = lo[i];
            a[(2 * i + 1, i)] = -1.0;
            b[2 * i + 1] = -hi[i];
        }
        let mut p = Self::new(a, b)?;
        p.name = Some(format!("box{n}"));
        Ok(p)
    }

    /// `[-1, 1]^n`.
    pub fn hypercube(n: usize) -> Result<Self> {
        Self::from_box(&vec![-1.0; n], &vec![1.0; n])
    }

    /// `{x ≥ 0, 1ᵀx < 1}` with `m = n + 1` rows.
    pub fn standard_simplex(n: usize) -> Result<Self> {
        let mut a = DMatrix::zeros(n + 1, n);
        let mut b = DVector::zeros(n + 1);
        for i in 0..n {
            a[(i, i)] = 1.0;
            a[(n, i)] = -1.0;
        }
        b[n] = -1.0;
        let mut p = Self::new(a, b)?;
        p.name = Some(format!("simplex{n}"));
        Ok(p)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    /// Number of constraints.
    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    /// Ambient dimension.
    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    pub fn slack(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.a * x - &self.b
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        x.len() == self.n() && self.slack(x).iter().all(|&s| s > 0.0)
    }

    pub fn b_scale(&self) -> f64 {
        self.b.amax().max(1.0)
    }

    pub(crate) fn check_dim(&self, x: &DVector<f64>, what: &'static str) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch {
                what,
                expected: self.n(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Axis-aligned bounds `(lo, hi)` when every row is `±c·e_i` and each
    /// coordinate is bounded on both sides.
    pub fn as_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let n = self.n();
        let mut lo = vec![f64::NEG_INFINITY; n];
        let mut hi = vec![f64::INFINITY; n];
        for (i, row) in self.a.row_iter().enumerate() {
            let nz: Vec<usize> = (0..n).filter(|&j| row[j] != 0.0).collect();
            if nz.len() != 1 {
                return None;
            }
            let j = nz[0];
            let c = row[j];
            let bound = self.b[i] / c;
            if c > 0.0 {
                lo[j] = lo[j].max(bound);
            } else {
                hi[j] = hi[j].min(bound);
            }
        }
        if lo.iter().chain(hi.iter()).all(|v| v.is_finite()) {
            Some((lo, hi))
        } else {
            None
        }
    }

    /// True when the rows are exactly the standard simplex `{x ≥ 0, 1ᵀx < 1}`
    /// up to row order and positive row scaling.
    pub fn is_standard_simplex(&self) -> bool {
        let (m, n) = self.a.shape();
        if m != n + 1 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut sum_row = false;
        for (i, row) in self.a.row_iter().enumerate() {
            let nz: Vec<usize> = (0..n).filter(|&j| row[j] != 0.0).collect();
            if nz.len() == 1 && row[nz[0]] > 0.0 && self.b[i] == 0.0 {
                seen[nz[0]] = true;
            } else if nz.len() == n {
                let c = row[0];
                if c < 0.0 && row.iter().all(|&v| v == c) && (self.b[i] / c - 1.0).abs() < 1e-15 {
                    sum_row = true;
                }
            }
        }
        sum_row && seen.iter().all(|&s| s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hypercube_document() {
        let doc = r#"{"A": [[1,0],[-1,0],[0,1],[0,-1]], "b": [-1,-1,-1,-1], "name": "sq"}"#;
        let p = Polytope::from_json(doc).unwrap();
        assert_eq!(p.m(), 4);
        assert_eq!(p.n(), 2);
        assert_eq!(p.name(), Some("sq"));
    }

    #[test]
    fn duplicated_column_is_rank_error() {
        let rows = vec![vec![1.0, 1.0], vec![-1.0, -1.0], vec![2.0, 2.0]];
        let err = Polytope::from_rows(&rows, &[-1.0, -1.0, -3.0]).unwrap_err();
        assert!(matches!(err, Error::RankDeficient { rank: 1, n: 2 }));
    }

    #[test]
    fn simplex_is_valid() {
        let p = Polytope::standard_simplex(3).unwrap();
        assert_eq!(p.m(), 4);
        assert!(p.is_standard_simplex());
        assert!(p.contains(&DVector::from_vec(vec![0.2, 0.2, 0.2])));
    }

    #[test]
    fn dimension_and_finiteness_errors() {
        let err = Polytope::from_rows(&[vec![1.0, 0.0], vec![0.0]], &[0.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
        let err = Polytope::from_rows(&[vec![1.0], vec![-1.0]], &[0.0]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
        let err = Polytope::from_rows(&[vec![f64::NAN], vec![-1.0]], &[0.0, 0.0]).unwrap_err();
        assert_eq!(err, Error::NonFinite("A"));
    }

    #[test]
    fn containment_is_strict() {
        let p = Polytope::hypercube(3).unwrap();
        assert!(p.contains(&DVector::zeros(3)));
        assert!(!p.contains(&DVector::from_vec(vec![1.0, 0.0, 0.0])));
        assert!(!p.contains(&DVector::from_vec(vec![2.0, 0.0, 0.0])));
        assert!(!p.contains(&DVector::zeros(2)));
    }

    #[test]
    fn box_detection() {
        let p = Polytope::from_box(&[0.0, -2.0], &[1.0, 3.0]).unwrap();
        assert_eq!(p.as_box(), Some((vec![0.0, -2.0], vec![1.0, 3.0])));
        assert!(Polytope::standard_simplex(2).unwrap().as_box().is_none());
    }

    #[test]
    fn doc_round_trip() {
        let p = Polytope::standard_simplex(2).unwrap();
        let q = Polytope::from_doc(&p.to_doc()).unwrap();
        assert_eq!(p.a(), q.a());
        assert_eq!(p.b(), q.b());
    }
}
