//! Lagrange bases on `[-1, 1]` expressed in Chebyshev polynomials.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Lagrange basis for a node set `τ_1 < … < τ_d` in `[-1, 1]`.
///
/// `coeffs[(r, j)]` is the coefficient of `T_r` in `φ_j`, and
/// `integral[(i, j)] = ∫_{-1}^{τ_i} φ_j`.
#[derive(Debug, Clone)]
pub struct LagrangeBasis {
    pub(crate) tau: Vec<f64>,
    pub(crate) coeffs: DMatrix<f64>,
    pub(crate) integral: DMatrix<f64>,
}

/// `T_0(τ), …, T_{k-1}(τ)`.
pub(crate) fn chebyshev_values(tau: f64, k: usize, out: &mut Vec<f64>) {
    out.clear();
    if k == 0 {
        return;
    }
    out.push(1.0);
    if k > 1 {
        out.push(tau);
    }
    for r in 2..k {
        let next = 2.0 * tau * out[r - 1] - out[r - 2];
        out.push(next);
    }
}

/// `∫_{-1}^{τ} T_r` for `r < k`, from the values `T_0..T_k` at `τ`.
pub(crate) fn chebyshev_integrals(tau: f64, t: &[f64], k: usize, out: &mut Vec<f64>) {
    debug_assert!(t.len() > k);
    out.clear();
    for r in 0..k {
        let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
        let val = match r {
            0 => tau + 1.0,
            1 => 0.5 * (tau * tau - 1.0),
            _ => {
                let rf = r as f64;
                // Antiderivative ½(T_{r+1}/(r+1) − T_{r−1}/(r−1)); T_k(−1) = (−1)^k.
                let at = 0.5 * (t[r + 1] / (rf + 1.0) - t[r - 1] / (rf - 1.0));
                let at_m1 = 0.5 * (-sign / (rf + 1.0) + sign / (rf - 1.0));
                at - at_m1
            }
        };
        out.push(val);
    }
}

impl LagrangeBasis {
    /// Basis at the Chebyshev points of the first kind, where the
    /// coefficient matrix is known in closed form by discrete orthogonality.
    pub fn chebyshev(d: usize) -> Self {
        let tau = standard_tau(d);
        let mut coeffs = DMatrix::zeros(d, d);
        let mut t = Vec::with_capacity(d);
        for (j, &tj) in tau.iter().enumerate() {
            chebyshev_values(tj, d, &mut t);
            for r in 0..d {
                let w = if r == 0 { 1.0 } else { 2.0 };
                coeffs[(r, j)] = w / d as f64 * t[r];
            }
        }
        Self::finish(tau, coeffs)
    }

    /// Basis for arbitrary distinct nodes in `[-1, 1]`.
    pub fn general(tau: &[f64]) -> Result<Self> {
        let d = tau.len();
        if d == 0 {
            return Err(Error::InvalidInput("need at least one node".into()));
        }
        let mut sorted = tau.to_vec();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let span = (sorted[d - 1] - sorted[0]).max(1.0);
        if sorted.windows(2).any(|w| w[1] - w[0] <= 1e-14 * span) {
            return Err(Error::DuplicateNodes);
        }
        // V[k, r] = T_r(τ_k); φ_j = Σ_r (V⁻¹)[r, j] T_r.
        let mut v = DMatrix::zeros(d, d);
        let mut t = Vec::with_capacity(d);
        for (k, &tk) in tau.iter().enumerate() {
            chebyshev_values(tk, d, &mut t);
            for r in 0..d {
                v[(k, r)] = t[r];
            }
        }
        let coeffs = v.lu().try_inverse().ok_or(Error::Singular)?;
        Ok(Self::finish(tau.to_vec(), coeffs))
    }

    fn finish(tau: Vec<f64>, coeffs: DMatrix<f64>) -> Self {
        let d = tau.len();
        let mut ints = DMatrix::zeros(d, d);
        let mut t = Vec::with_capacity(d + 1);
        let mut it = Vec::with_capacity(d);
        for (i, &ti) in tau.iter().enumerate() {
            chebyshev_values(ti, d + 1, &mut t);
            chebyshev_integrals(ti, &t, d, &mut it);
            for r in 0..d {
                ints[(i, r)] = it[r];
            }
        }
        let integral = ints * &coeffs;
        Self {
            tau,
            coeffs,
            integral,
        }
    }

    pub fn degree(&self) -> usize {
        self.tau.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.tau
    }

    pub fn integral_matrix(&self) -> &DMatrix<f64> {
        &self.integral
    }
}

/// Chebyshev points of the first kind in ascending order, exactly
/// symmetric about zero.
pub(crate) fn standard_tau(d: usize) -> Vec<f64> {
    let df = d as f64;
    (0..d)
        .map(|k| (std::f64::consts::PI * (2.0 * k as f64 + 1.0 - df) / (2.0 * df)).sin())
        .collect()
}

type Cache = RwLock<HashMap<usize, Arc<LagrangeBasis>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Shared Chebyshev basis of `d` nodes, built once per process.
pub fn standard_basis(d: usize) -> Arc<LagrangeBasis> {
    if let Some(b) = cache().read().expect("basis cache poisoned").get(&d) {
        return b.clone();
    }
    let built = Arc::new(LagrangeBasis::chebyshev(d));
    cache()
        .write()
        .expect("basis cache poisoned")
        .entry(d)
        .or_insert(built)
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_and_general_agree() {
        for d in [1, 2, 5, 12] {
            let a = LagrangeBasis::chebyshev(d);
            let b = LagrangeBasis::general(&standard_tau(d)).unwrap();
            assert!((&a.integral - &b.integral).amax() < 1e-12, "d={d}");
        }
    }

    #[test]
    fn integral_of_one_is_length() {
        let b = LagrangeBasis::chebyshev(9);
        for i in 0..9 {
            let s: f64 = b.integral.row(i).sum();
            assert!((s - (b.tau[i] + 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn duplicate_nodes_rejected() {
        assert_eq!(
            LagrangeBasis::general(&[0.1, 0.5, 0.1]).unwrap_err(),
            Error::DuplicateNodes
        );
    }

    #[test]
    fn cache_returns_shared_instance() {
        let a = standard_basis(7);
        let b = standard_basis(7);
        assert!(Arc::ptr_eq(&a, &b));
    }
}
