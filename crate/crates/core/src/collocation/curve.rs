use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::basis::{chebyshev_integrals, chebyshev_values, LagrangeBasis};
use super::END_SLACK;
use crate::error::{Error, Result};

/// Vector polynomial `p(t) = v + ∫₀ᵗ Σ_j f_j φ_j(s) ds` on `[0, ℓ]`.
///
/// Stores the derivative samples `f_j` at the collocation nodes together
/// with their Chebyshev coefficients, so that both `p` and `p'` can be
/// evaluated anywhere in the interval.
#[derive(Debug, Clone)]
pub struct PolyCurve {
    v: DVector<f64>,
    len: f64,
    basis: Arc<LagrangeBasis>,
    /// `ζ_i = p(c_i)`, one row per node.
    values: DMatrix<f64>,
    /// `f_i = p'(c_i)`, one row per node.
    derivs: DMatrix<f64>,
    /// Chebyshev coefficients of `p'` in `τ = 2t/ℓ − 1`.
    cheb: DMatrix<f64>,
}

impl PolyCurve {
    /// Curve through `v` whose derivative takes the values `derivs` at the
    /// nodes of `basis` mapped onto `[0, len]`.
    pub fn from_derivatives(
        v: DVector<f64>,
        len: f64,
        basis: Arc<LagrangeBasis>,
        derivs: DMatrix<f64>,
    ) -> Self {
        let values = node_values(&v, len, &basis, &derivs);
        Self::from_parts(v, len, basis, values, derivs)
    }

    pub(crate) fn from_parts(
        v: DVector<f64>,
        len: f64,
        basis: Arc<LagrangeBasis>,
        values: DMatrix<f64>,
        derivs: DMatrix<f64>,
    ) -> Self {
        let cheb = &basis.coeffs * &derivs;
        Self {
            v,
            len,
            basis,
            values,
            derivs,
            cheb,
        }
    }

    pub fn len(&self) -> f64 {
        self.len
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn initial(&self) -> &DVector<f64> {
        &self.v
    }

    /// Node times `c_i` in ascending order.
    pub fn node_times(&self) -> Vec<f64> {
        self.basis
            .tau
            .iter()
            .map(|t| 0.5 * self.len * (1.0 + t))
            .collect()
    }

    /// `p(c_i)` as rows.
    pub fn node_values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// `p'(c_i)` as rows.
    pub fn node_derivatives(&self) -> &DMatrix<f64> {
        &self.derivs
    }

    pub fn node_value(&self, i: usize) -> DVector<f64> {
        self.values.row(i).transpose()
    }

    pub fn node_derivative(&self, i: usize) -> DVector<f64> {
        self.derivs.row(i).transpose()
    }

    fn to_tau(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0 && t <= self.len * END_SLACK) {
            return Err(Error::OutOfRange { t, len: self.len });
        }
        Ok((2.0 * t / self.len - 1.0).clamp(-1.0, 1.0))
    }

    pub fn eval(&self, t: f64) -> Result<DVector<f64>> {
        let tau = self.to_tau(t)?;
        if t == 0.0 {
            return Ok(self.v.clone());
        }
        let d = self.degree();
        let mut tv = Vec::with_capacity(d + 1);
        let mut iv = Vec::with_capacity(d);
        chebyshev_values(tau, d + 1, &mut tv);
        chebyshev_integrals(tau, &tv, d, &mut iv);
        let w = DVector::from_vec(iv);
        Ok(&self.v + self.cheb.tr_mul(&w) * (0.5 * self.len))
    }

    pub fn eval_derivative(&self, t: f64) -> Result<DVector<f64>> {
        let tau = self.to_tau(t)?;
        let d = self.degree();
        let mut tv = Vec::with_capacity(d);
        chebyshev_values(tau, d, &mut tv);
        Ok(self.cheb.tr_mul(&DVector::from_vec(tv)))
    }

    pub fn end(&self) -> DVector<f64> {
        self.eval(self.len).expect("end point is in range")
    }

    pub fn end_derivative(&self) -> DVector<f64> {
        self.eval_derivative(self.len).expect("end point is in range")
    }

    /// Components `start..start+count`, multiplied by `scale`.
    pub fn components(&self, start: usize, count: usize, scale: f64) -> PolyCurve {
        let d = self.degree();
        PolyCurve {
            v: self.v.rows(start, count) * scale,
            len: self.len,
            basis: self.basis.clone(),
            values: self.values.view((0, start), (d, count)) * scale,
            derivs: self.derivs.view((0, start), (d, count)) * scale,
            cheb: self.cheb.view((0, start), (d, count)) * scale,
        }
    }
}

/// `ζ = v + (ℓ/2)·M_τ f`, one row per node.
pub(crate) fn node_values(
    v: &DVector<f64>,
    len: f64,
    basis: &LagrangeBasis,
    derivs: &DMatrix<f64>,
) -> DMatrix<f64> {
    let mut out = &basis.integral * derivs * (0.5 * len);
    for mut row in out.row_iter_mut() {
        row += v.transpose();
    }
    out
}

/// Consecutive [`PolyCurve`]s covering `[0, T]`.
#[derive(Debug, Clone, Default)]
pub struct PiecewiseCurve {
    starts: Vec<f64>,
    pieces: Vec<PolyCurve>,
}

impl PiecewiseCurve {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, piece: PolyCurve) {
        let start = self.total_len();
        self.starts.push(start);
        self.pieces.push(piece);
    }

    pub fn pieces(&self) -> &[PolyCurve] {
        &self.pieces
    }

    /// Start time of each piece.
    pub fn starts(&self) -> &[f64] {
        &self.starts
    }

    pub fn total_len(&self) -> f64 {
        match (self.starts.last(), self.pieces.last()) {
            (Some(s), Some(p)) => s + p.len(),
            _ => 0.0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let total = self.total_len();
        if self.pieces.is_empty() || !(t >= 0.0 && t <= total * END_SLACK) {
            return Err(Error::OutOfRange { t, len: total });
        }
        let t = t.min(total);
        let k = self.starts.partition_point(|&s| s <= t).saturating_sub(1);
        let local = (t - self.starts[k]).clamp(0.0, self.pieces[k].len());
        Ok((k, local))
    }

    pub fn eval(&self, t: f64) -> Result<DVector<f64>> {
        let (k, local) = self.locate(t)?;
        self.pieces[k].eval(local)
    }

    pub fn eval_derivative(&self, t: f64) -> Result<DVector<f64>> {
        let (k, local) = self.locate(t)?;
        self.pieces[k].eval_derivative(local)
    }

    pub fn end(&self) -> Option<DVector<f64>> {
        self.pieces.last().map(PolyCurve::end)
    }

    /// All node times on the global clock, ascending.
    pub fn node_times(&self) -> Vec<f64> {
        self.starts
            .iter()
            .zip(&self.pieces)
            .flat_map(|(s, p)| p.node_times().into_iter().map(move |c| s + c))
            .collect()
    }

    pub fn components(&self, start: usize, count: usize, scale: f64) -> PiecewiseCurve {
        PiecewiseCurve {
            starts: self.starts.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| p.components(start, count, scale))
                .collect(),
        }
    }
}
