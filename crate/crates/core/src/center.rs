//! Interior-point utilities: phase one, analytic center, bounding box.

use nalgebra::{DMatrix, DVector};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::point::ManifoldPoint;
use crate::polytope::Polytope;

/// Damped Newton minimisation of `κ·cᵀz − Σ log(Mz − r)` from a strictly
/// feasible `z`. Returns the minimiser and the iterations spent.
fn newton_barrier(
    mat: &DMatrix<f64>,
    rhs: &DVector<f64>,
    cost: Option<(&DVector<f64>, f64)>,
    mut z: DVector<f64>,
    tol: f64,
    max_iters: usize,
) -> Result<(DVector<f64>, usize)> {
    for it in 0..max_iters {
        let s = mat * &z - rhs;
        let inv_s = s.map(|v| 1.0 / v);
        let mut grad = -mat.tr_mul(&inv_s);
        if let Some((c, kappa)) = cost {
            grad += c * kappa;
        }
        let mut scaled = mat.clone();
        for (mut row, w) in scaled.row_iter_mut().zip(inv_s.iter()) {
            row *= *w;
        }
        let hess = scaled.tr_mul(&scaled);
        let chol = hess.cholesky().ok_or(Error::Factorization)?;
        let step = chol.solve(&grad);
        let decrement = grad.dot(&step).max(0.0).sqrt();
        if !decrement.is_finite() {
            return Err(Error::NonFinite("Newton step"));
        }
        if decrement <= tol {
            return Ok((z, it));
        }
        let mut t = if decrement > 0.25 { 1.0 / (1.0 + decrement) } else { 1.0 };
        // Full steps can still overshoot on the quadratic-convergence side;
        // backtrack until strictly feasible.
        loop {
            let cand = &z - &step * t;
            if (mat * &cand - rhs).iter().all(|&v| v > 0.0) {
                z = cand;
                break;
            }
            t *= 0.5;
            if t < 1e-16 {
                return Err(Error::Factorization);
            }
        }
    }
    Err(Error::IterationLimit { iters: max_iters })
}

/// Find some strictly interior point by path-following on
/// `min t  s.t.  Ax − b ≥ (1 − t)·1`.
pub fn phase_one(p: &Polytope) -> Result<DVector<f64>> {
    let (m, n) = (p.m(), p.n());
    let x0 = DVector::zeros(n);
    if p.slack(&x0).min() > 0.0 {
        return Ok(x0);
    }
    // z = (x, t); rows [a_i, 1], rhs b_i + 1.
    let mut mat = DMatrix::zeros(m, n + 1);
    mat.view_mut((0, 0), (m, n)).copy_from(p.a());
    mat.column_mut(n).fill(1.0);
    let rhs = p.b().map(|v| v + 1.0);
    let s0 = p.slack(&x0).min();
    let mut z = DVector::zeros(n + 1);
    z[n] = 2.0 - s0;
    let mut cost = DVector::zeros(n + 1);
    cost[n] = 1.0;
    let mut kappa = 1.0;
    for _ in 0..80 {
        let (zn, _) = newton_barrier(&mat, &rhs, Some((&cost, kappa)), z, 1e-6, 200)
            .map_err(|_| Error::PhaseOneFailed)?;
        z = zn;
        let t = z[n];
        let x = z.rows(0, n).into_owned();
        // Duality gap m/κ small next to the interior margin 1 − t.
        if t < 1.0 && (m as f64) / kappa < 0.1 * (1.0 - t) && p.slack(&x).min() > 0.0 {
            return Ok(x);
        }
        if (m as f64) / kappa < 1e-9 {
            break;
        }
        kappa *= 4.0;
    }
    Err(Error::PhaseOneFailed)
}

/// Minimiser of `φ(x) = −Σ log(a_iᵀx − b_i)`.
///
/// Starts from `start` when given, otherwise from [`phase_one`]. Stops when
/// the Newton decrement `‖∇φ‖_{g⁻¹}` falls below `tol.center_tol`;
/// hitting the iteration cap signals an unbounded (or empty) polytope.
pub fn analytic_center(
    p: &Polytope,
    start: Option<&DVector<f64>>,
    tol: &Tolerances,
) -> Result<ManifoldPoint> {
    let x0 = match start {
        Some(x) => {
            p.check_dim(x, "start point")?;
            if !p.contains(x) {
                return Err(Error::NotInterior {
                    min_slack: p.slack(x).min(),
                });
            }
            x.clone()
        }
        None => phase_one(p)?,
    };
    let (x, _) = newton_barrier(p.a(), p.b(), None, x0, tol.center_tol, tol.center_max_iters)?;
    ManifoldPoint::with_tolerances(p, x, tol)
}

/// Outer bounding box of the polytope: `lo_i ≤ x_i ≤ hi_i` for every
/// interior `x`. Each bound is an interior-point LP solve, padded by the
/// barrier duality gap so the box is never too small.
pub fn bounding_box(p: &Polytope) -> Result<(Vec<f64>, Vec<f64>)> {
    if let Some(b) = p.as_box() {
        return Ok(b);
    }
    let n = p.n();
    let m = p.m() as f64;
    let center = analytic_center(p, None, &Tolerances::default())?;
    let mut lo = vec![0.0; n];
    let mut hi = vec![0.0; n];
    for i in 0..n {
        for (sign, out) in [(1.0, &mut lo), (-1.0, &mut hi)] {
            let mut c = DVector::zeros(n);
            c[i] = sign;
            let mut z = center.x().clone();
            let mut kappa = 1.0;
            loop {
                let (zn, _) = newton_barrier(p.a(), p.b(), Some((&c, kappa)), z, 1e-6, 500)?;
                z = zn;
                if c.dot(&z).abs() > 1e12 {
                    return Err(Error::Unbounded);
                }
                if m / kappa <= 1e-8 {
                    break;
                }
                kappa *= 8.0;
            }
            // Barrier optimum is within about m/κ of the LP optimum.
            let gap = 2.0 * m / kappa;
            *out.get_mut(i).unwrap() = if sign > 0.0 { z[i] - gap } else { z[i] + gap };
        }
    }
    Ok((lo, hi))
}
