//! Chebyshev-node collocation for first- and second-order ODEs.
//!
//! A solve on `[0, ℓ]` looks for node values `ζ_i ≈ u(c_i)` satisfying
//! `ζ_i = v + Σ_j M_ij F(ζ_j, c_j)` with `M_ij = ∫₀^{c_i} φ_j`, by plain
//! fixed-point iteration. The resulting [`PolyCurve`] interpolates the
//! derivative samples and integrates them exactly.

mod basis;
mod curve;
mod solver;

use nalgebra::DMatrix;

pub use basis::{standard_basis, LagrangeBasis};
pub use curve::{PiecewiseCurve, PolyCurve};
pub use solver::{
    collocation_first_order, collocation_multistep, collocation_second_order,
    solve_first_order, solve_first_order_indexed, solve_second_order_indexed, MultistepSolution,
    SecondOrderCurve, SolveReport,
};
pub(crate) use solver::march;

use crate::error::{Error, Result};

/// Evaluation times up to `len · END_SLACK` are accepted and clamped to
/// `len`, absorbing round-off in callers' time grids.
pub const END_SLACK: f64 = 1.0 + 1e-12;

/// Collocation nodes on `[0, ℓ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevNodes {
    /// Node times in ascending order.
    pub values: Vec<f64>,
    /// `permutation[k]` is the (zero-based) index `i − 1` in
    /// `c_i = ℓ/2 + (ℓ/2)cos((2i−1)π/(2d))` of the k-th smallest node.
    pub permutation: Vec<usize>,
}

/// The `d` Chebyshev points `c_i = ℓ/2 + (ℓ/2)cos((2i−1)π/(2d))`.
pub fn chebyshev_nodes(d: usize, len: f64) -> Result<ChebyshevNodes> {
    if d == 0 {
        return Err(Error::InvalidInput("need at least one node".into()));
    }
    if !(len > 0.0 && len.is_finite()) {
        return Err(Error::InvalidInput("interval length must be positive".into()));
    }
    let tau = basis::standard_tau(d);
    Ok(ChebyshevNodes {
        values: tau.iter().map(|t| 0.5 * len * (1.0 + t)).collect(),
        permutation: (0..d).rev().collect(),
    })
}

/// `M_ij = ∫₀^{c_i} φ_j(s) ds` for the Lagrange basis `φ_j` of the given
/// nodes on `[0, ℓ]`. Nodes may be in any order; rows and columns follow
/// the input order.
pub fn lagrange_integral_matrix(nodes: &[f64], len: f64) -> Result<DMatrix<f64>> {
    if !(len > 0.0 && len.is_finite()) {
        return Err(Error::InvalidInput("interval length must be positive".into()));
    }
    let tau: Vec<f64> = nodes.iter().map(|c| 2.0 * c / len - 1.0).collect();
    let basis = LagrangeBasis::general(&tau)?;
    Ok(basis.integral_matrix() * (0.5 * len))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_formula() {
        let n1 = chebyshev_nodes(1, 1.0).unwrap();
        assert!((n1.values[0] - 0.5).abs() < 1e-16);
        let n2 = chebyshev_nodes(2, 1.0).unwrap();
        let r = 2f64.sqrt() / 4.0;
        assert!((n2.values[0] - (0.5 - r)).abs() < 1e-15);
        assert!((n2.values[1] - (0.5 + r)).abs() < 1e-15);
        let d = 8;
        let n8 = chebyshev_nodes(d, 2.0).unwrap();
        for k in 0..d {
            let i = n8.permutation[k] + 1;
            let direct = 1.0
                + (std::f64::consts::PI * (2 * i - 1) as f64 / (2.0 * d as f64)).cos();
            assert!((n8.values[k] - direct).abs() < 1e-14);
            assert!((n8.values[k] + n8.values[d - 1 - k] - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn one_node_integral() {
        let m = lagrange_integral_matrix(&[0.5], 1.0).unwrap();
        assert!((m[(0, 0)] - 0.5).abs() < 1e-16);
    }

    #[test]
    fn partition_of_unity() {
        let nodes = chebyshev_nodes(2, 1.0).unwrap().values;
        let m = lagrange_integral_matrix(&nodes, 1.0).unwrap();
        for i in 0..2 {
            assert!((m.row(i).sum() - nodes[i]).abs() < 1e-15);
        }
    }
}
