//! Interior points with their cached log-barrier quantities.

use nalgebra::{DMatrix, DVector};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::polytope::Polytope;

/// An interior point `x` together with the local log-barrier data:
/// slack `s_x = Ax − b`, rescaled matrix `A_x = S_x⁻¹A`, the Cholesky
/// factor of the metric `g(x) = A_xᵀA_x`, leverage scores `σ_x` and the
/// drift `μ(x)`.
#[derive(Debug, Clone)]
pub struct ManifoldPoint {
    x: DVector<f64>,
    slack: DVector<f64>,
    a_x: DMatrix<f64>,
    /// Lower-triangular `L` with `g = LLᵀ`.
    chol_l: DMatrix<f64>,
    /// `L⁻¹A_xᵀ` (n×m); `P_x = WᵀW` for this `W`.
    whitened: DMatrix<f64>,
    leverage: DVector<f64>,
    drift: DVector<f64>,
}

impl ManifoldPoint {
    pub fn new(p: &Polytope, x: DVector<f64>) -> Result<Self> {
        Self::with_tolerances(p, x, &Tolerances::default())
    }

    pub fn with_tolerances(p: &Polytope, x: DVector<f64>, tol: &Tolerances) -> Result<Self> {
        p.check_dim(&x, "point")?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("point"));
        }
        let slack = p.slack(&x);
        let min_slack = slack.min();
        if !(min_slack > 0.0) || min_slack < tol.boundary_guard * p.b_scale() {
            return Err(Error::NotInterior { min_slack });
        }
        let mut a_x = p.a().clone();
        for (mut row, s) in a_x.row_iter_mut().zip(slack.iter()) {
            row /= *s;
        }
        let g = a_x.tr_mul(&a_x);
        let chol = g.cholesky().ok_or(Error::Factorization)?;
        let chol_l = chol.l();
        let whitened = chol_l
            .solve_lower_triangular(&a_x.transpose())
            .ok_or(Error::Factorization)?;
        let leverage = DVector::from_iterator(
            whitened.ncols(),
            whitened.column_iter().map(|c| c.norm_squared()),
        );
        if leverage.iter().any(|v| !v.is_finite()) {
            return Err(Error::Factorization);
        }
        let mut drift = a_x.tr_mul(&leverage);
        solve_with_factor(&chol_l, &mut drift);
        Ok(Self {
            x,
            slack,
            a_x,
            chol_l,
            whitened,
            leverage,
            drift,
        })
    }

    pub fn x(&self) -> &DVector<f64> {
        &self.x
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn slack(&self) -> &DVector<f64> {
        &self.slack
    }

    /// `A_x = S_x⁻¹A`.
    pub fn rescaled(&self) -> &DMatrix<f64> {
        &self.a_x
    }

    pub fn leverage(&self) -> &DVector<f64> {
        &self.leverage
    }

    /// `μ(x) = (A_xᵀA_x)⁻¹A_xᵀσ_x`.
    pub fn drift(&self) -> &DVector<f64> {
        &self.drift
    }

    pub fn cholesky_factor(&self) -> &DMatrix<f64> {
        &self.chol_l
    }

    /// Dense metric `g(x)`.
    pub fn metric(&self) -> DMatrix<f64> {
        &self.chol_l * self.chol_l.transpose()
    }

    /// `g(x)⁻¹ v`.
    pub fn solve_metric(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = v.clone();
        solve_with_factor(&self.chol_l, &mut out);
        out
    }

    pub fn solve_metric_matrix(&self, v: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = v.clone();
        self.chol_l.solve_lower_triangular_mut(&mut out);
        self.chol_l.tr_solve_lower_triangular_mut(&mut out);
        out
    }

    /// Slack velocity `s_{x,v} = A_x v`.
    pub fn slack_velocity(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.a_x * v
    }

    /// `⟨u, v⟩_x = uᵀA_xᵀA_x v`.
    pub fn metric_inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        let su = &self.a_x * u;
        let sv = &self.a_x * v;
        su.dot(&sv)
    }

    pub fn metric_norm(&self, v: &DVector<f64>) -> f64 {
        (&self.a_x * v).norm()
    }

    /// `log det g(x)` from the Cholesky diagonal.
    pub fn log_det_metric(&self) -> f64 {
        2.0 * self.chol_l.diagonal().iter().map(|d| d.ln()).sum::<f64>()
    }

    /// `P_x y` for an m-vector `y`, without forming `P_x`.
    pub fn project(&self, y: &DVector<f64>) -> DVector<f64> {
        self.whitened.tr_mul(&(&self.whitened * y))
    }

    /// `L⁻¹A_xᵀ`, so that `P_x = WᵀW`.
    pub fn whitened_rows(&self) -> &DMatrix<f64> {
        &self.whitened
    }

    /// `(A_xᵀA_x)⁻¹A_xᵀ y`: the least-squares map used by every
    /// connection-type formula.
    pub fn pull_back(&self, y: &DVector<f64>) -> DVector<f64> {
        let mut out = self.a_x.tr_mul(y);
        solve_with_factor(&self.chol_l, &mut out);
        out
    }

    /// A g-orthonormal frame at `x`: the columns of `L⁻ᵀ`.
    pub fn orthonormal_frame(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut out = DMatrix::identity(n, n);
        self.chol_l.tr_solve_lower_triangular_mut(&mut out);
        out
    }

    /// `L⁻ᵀ z`; maps a standard normal draw to covariance `g(x)⁻¹`.
    pub fn inverse_factor_transpose(&self, z: &DVector<f64>) -> DVector<f64> {
        let mut out = z.clone();
        self.chol_l.tr_solve_lower_triangular_mut(&mut out);
        out
    }
}

fn solve_with_factor(l: &DMatrix<f64>, v: &mut DVector<f64>) {
    l.solve_lower_triangular_mut(v);
    l.tr_solve_lower_triangular_mut(v);
}

/// Free-function form of [`ManifoldPoint::new`].
pub fn make_point(p: &Polytope, x: DVector<f64>) -> Result<ManifoldPoint> {
    ManifoldPoint::new(p, x)
}

pub fn drift(p: &ManifoldPoint) -> DVector<f64> {
    p.drift().clone()
}

pub fn metric_inner(p: &ManifoldPoint, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    p.metric_inner(u, v)
}

pub fn log_det_metric(p: &ManifoldPoint) -> f64 {
    p.log_det_metric()
}

/// Gram–Schmidt in the g-metric. Columns of `frame` are replaced by a
/// g-orthonormal basis spanning the same flag.
pub fn orthonormalize_in_metric(p: &ManifoldPoint, frame: &mut DMatrix<f64>) -> Result<()> {
    let n = frame.ncols();
    for j in 0..n {
        for _pass in 0..2 {
            for k in 0..j {
                let proj = p.metric_inner(&frame.column(k).into_owned(), &frame.column(j).into_owned());
                let ck = frame.column(k).into_owned();
                let mut cj = frame.column_mut(j);
                cj.axpy(-proj, &ck, 1.0);
            }
        }
        let norm = p.metric_norm(&frame.column(j).into_owned());
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Singular);
        }
        frame.column_mut(j).scale_mut(1.0 / norm);
    }
    Ok(())
}

/// `max_ij |XᵀgX − I|`.
pub fn frame_deviation(p: &ManifoldPoint, frame: &DMatrix<f64>) -> f64 {
    let s = p.rescaled() * frame;
    let gram = s.tr_mul(&s);
    let n = gram.nrows();
    let mut dev = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((gram[(i, j)] - target).abs());
        }
    }
    dev
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval() -> Polytope {
        Polytope::from_box(&[-1.0], &[1.0]).unwrap()
    }

    #[test]
    fn hypercube_center() {
        let p = Polytope::hypercube(3).unwrap();
        let pt = ManifoldPoint::new(&p, DVector::zeros(3)).unwrap();
        assert!(pt.slack().iter().all(|&s| (s - 1.0).abs() < 1e-15));
        let g = pt.metric();
        assert!((g - DMatrix::identity(3, 3) * 2.0).amax() < 1e-14);
        assert!(pt.leverage().iter().all(|&s| (s - 0.5).abs() < 1e-14));
        assert!(pt.drift().amax() < 1e-15);
        assert!((pt.log_det_metric() - 3.0 * 2f64.ln()).abs() < 1e-14);
        let e1 = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        assert!((pt.metric_inner(&e1, &e1) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn interval_center() {
        let pt = ManifoldPoint::new(&interval(), DVector::from_vec(vec![0.0])).unwrap();
        assert!((pt.metric()[(0, 0)] - 2.0).abs() < 1e-15);
        assert!((pt.leverage()[0] - 0.5).abs() < 1e-15);
        assert!((pt.leverage()[1] - 0.5).abs() < 1e-15);
        assert!((pt.log_det_metric() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn exterior_and_boundary_rejected() {
        let p = interval();
        for x in [1.0, 1.5, -1.0] {
            let err = ManifoldPoint::new(&p, DVector::from_vec(vec![x])).unwrap_err();
            assert!(matches!(err, Error::NotInterior { .. }), "{x}: {err:?}");
        }
        let err = ManifoldPoint::new(&p, DVector::from_vec(vec![1.0 - 1e-14])).unwrap_err();
        assert!(matches!(err, Error::NotInterior { .. }));
        assert!(ManifoldPoint::new(&p, DVector::from_vec(vec![1.0 - 1e-9])).is_ok());
    }

    #[test]
    fn frame_is_orthonormal() {
        let p = Polytope::standard_simplex(3).unwrap();
        let pt = ManifoldPoint::new(&p, DVector::from_vec(vec![0.1, 0.3, 0.2])).unwrap();
        let x = pt.orthonormal_frame();
        assert!(frame_deviation(&pt, &x) < 1e-12);
        let mut y = DMatrix::from_fn(3, 3, |i, j| if i <= j { 1.0 + i as f64 } else { 0.5 });
        orthonormalize_in_metric(&pt, &mut y).unwrap();
        assert!(frame_deviation(&pt, &y) < 1e-12);
    }
}
