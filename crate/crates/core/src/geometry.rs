//! Closed-form differential geometry of the log-barrier manifold.
//!
//! Every formula works in Euclidean coordinates and uses only the cached
//! factorization in [`ManifoldPoint`]; the m×m projection `P_x` is never
//! formed.

use nalgebra::{DMatrix, DVector};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::point::{frame_deviation, ManifoldPoint};
use crate::polytope::Polytope;

/// `Γ(u, v) = −g⁻¹A_xᵀ(s_u ∘ s_v)`.
pub fn christoffel_action(p: &ManifoldPoint, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
    let su = p.slack_velocity(u);
    let sv = p.slack_velocity(v);
    -p.pull_back(&su.component_mul(&sv))
}

/// Geodesic acceleration `γ'' = g⁻¹A_γᵀ s_{γ'}²`.
pub fn geodesic_rhs(p: &ManifoldPoint, velocity: &DVector<f64>) -> DVector<f64> {
    let s = p.slack_velocity(velocity);
    p.pull_back(&s.component_mul(&s))
}

/// Parallel-transport derivative `dv/dt = g⁻¹A_γᵀ S_{γ'} A_γ v`.
pub fn parallel_transport_rhs(
    p: &ManifoldPoint,
    curve_velocity: &DVector<f64>,
    v: &DVector<f64>,
) -> DVector<f64> {
    let s = p.slack_velocity(curve_velocity);
    let sv = p.slack_velocity(v);
    p.pull_back(&s.component_mul(&sv))
}

/// Same as [`parallel_transport_rhs`] applied to every column of `frame`.
pub fn parallel_transport_rhs_matrix(
    p: &ManifoldPoint,
    curve_velocity: &DVector<f64>,
    frame: &DMatrix<f64>,
) -> DMatrix<f64> {
    let s = p.slack_velocity(curve_velocity);
    let mut b = p.rescaled() * frame;
    for (mut row, si) in b.row_iter_mut().zip(s.iter()) {
        row *= *si;
    }
    p.solve_metric_matrix(&p.rescaled().tr_mul(&b))
}

/// `⟨R(u,v)w, z⟩ = (s_u s_w)ᵀP(s_v s_z) − (s_u s_z)ᵀP(s_v s_w)`.
pub fn riemann_inner(
    p: &ManifoldPoint,
    u: &DVector<f64>,
    v: &DVector<f64>,
    w: &DVector<f64>,
    z: &DVector<f64>,
) -> f64 {
    let (su, sv, sw, sz) = (
        p.slack_velocity(u),
        p.slack_velocity(v),
        p.slack_velocity(w),
        p.slack_velocity(z),
    );
    let wm = p.whitened_rows();
    let uw = wm * su.component_mul(&sw);
    let vz = wm * sv.component_mul(&sz);
    let uz = wm * su.component_mul(&sz);
    let vw = wm * sv.component_mul(&sw);
    uw.dot(&vz) - uz.dot(&vw)
}

/// `Ric(u) = s_uᵀ P^{(2)} s_u − σᵀ P s_u²`, with `P^{(2)}` the entrywise
/// square of `P_x`.
pub fn ricci(p: &ManifoldPoint, u: &DVector<f64>) -> f64 {
    let s = p.slack_velocity(u);
    let wm = p.whitened_rows();
    // s_uᵀ(P∘P)s_u = ‖W S_u Wᵀ‖_F² for P = WᵀW.
    let mut ws = wm.clone();
    for (mut col, si) in ws.column_iter_mut().zip(s.iter()) {
        col *= *si;
    }
    let first = (&ws * wm.transpose()).norm_squared();
    let second = p.leverage().dot(&p.project(&s.component_mul(&s)));
    first - second
}

/// Curvature operator `R(t)u = R(u, γ')γ'` in a g-orthonormal frame.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureOperator {
    /// `R_ij = ⟨R(X_i, γ')γ', X_j⟩`.
    pub matrix: DMatrix<f64>,
    /// Frame vectors as columns, Euclidean coordinates.
    pub frame: DMatrix<f64>,
}

impl CurvatureOperator {
    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn frobenius(&self) -> f64 {
        self.matrix.norm()
    }
}

/// Entries `⟨R(X_i, γ')γ', X_j⟩` for the columns `X_i` of `frame`.
///
/// The frame must be g-orthonormal at `p` within `tol.frame_tol`.
pub fn frame_curvature_matrix(
    p: &ManifoldPoint,
    curve_velocity: &DVector<f64>,
    frame: &DMatrix<f64>,
    tol: &Tolerances,
) -> Result<CurvatureOperator> {
    let n = p.dim();
    if frame.nrows() != n || frame.ncols() != n {
        return Err(Error::DimensionMismatch {
            what: "frame",
            expected: n,
            found: if frame.nrows() != n { frame.nrows() } else { frame.ncols() },
        });
    }
    let deviation = frame_deviation(p, frame);
    if !(deviation <= tol.frame_tol) {
        return Err(Error::FrameNotOrthonormal { deviation });
    }
    Ok(CurvatureOperator {
        matrix: curvature_in_frame(p, curve_velocity, frame),
        frame: frame.clone(),
    })
}

/// `CᵀC − Bᵀdiag(P s²)B` with `B = A_x X`, `C = W S_{γ'} B`; no frame check.
pub(crate) fn curvature_in_frame(
    p: &ManifoldPoint,
    curve_velocity: &DVector<f64>,
    frame: &DMatrix<f64>,
) -> DMatrix<f64> {
    let s = p.slack_velocity(curve_velocity);
    let b = p.rescaled() * frame;
    let mut sb = b.clone();
    for (mut row, si) in sb.row_iter_mut().zip(s.iter()) {
        row *= *si;
    }
    let c = p.whitened_rows() * &sb;
    let q = p.project(&s.component_mul(&s));
    let mut qb = b.clone();
    for (mut row, qi) in qb.row_iter_mut().zip(q.iter()) {
        row *= *qi;
    }
    let mut r = c.tr_mul(&c) - b.tr_mul(&qb);
    // Symmetric by construction; remove rounding asymmetry.
    let rt = r.transpose();
    r += rt;
    r *= 0.5;
    r
}

/// One term of `V(γ)` from a slack velocity `s_{γ'(t)}`.
pub fn auxiliary_v_term(slack_velocity: &[f64], h: f64, n: usize) -> f64 {
    let nf = n as f64;
    let l4 = slack_velocity.iter().map(|s| s.powi(4)).sum::<f64>().powf(0.25);
    let linf = slack_velocity.iter().fold(0.0_f64, |a, s| a.max(s.abs()));
    // log n = 0 at n = 1; the √h term keeps the denominator positive.
    let denom = (nf.ln() / nf).sqrt() + h.sqrt();
    l4 / nf.powf(-0.25) + linf / denom
}

/// `V(γ) = max_t ( ‖s_{γ'}‖₄ / n^{−1/4} + ‖s_{γ'}‖_∞ / (√(log n / n) + √h) )`
/// over the supplied samples of the geodesic.
pub fn auxiliary_v<'a, I>(samples: I, h: f64, n: usize) -> f64
where
    I: IntoIterator<Item = (&'a ManifoldPoint, &'a DVector<f64>)>,
{
    samples
        .into_iter()
        .map(|(p, v)| auxiliary_v_term(p.slack_velocity(v).as_slice(), h, n))
        .fold(0.0, f64::max)
}

/// Largest `t ≥ 0` with `x + t·d` still in the closure, from slack ratios.
/// `None` when the ray never leaves the polytope.
pub fn ray_exit(p: &Polytope, x: &DVector<f64>, d: &DVector<f64>) -> Option<f64> {
    let s = p.slack(x);
    let ad = p.a() * d;
    let mut best: Option<f64> = None;
    for (si, ai) in s.iter().zip(ad.iter()) {
        if *ai < 0.0 {
            let t = si / -ai;
            best = Some(best.map_or(t, |b: f64| b.min(t)));
        }
    }
    best
}

/// Hilbert distance `log(1 + |x−y||p−q| / (|p−x||y−q|))` where `p, q` are
/// the boundary points of the chord through `x, y` (p beyond x, q beyond y).
pub fn hilbert_distance(p: &Polytope, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    p.check_dim(x, "x")?;
    p.check_dim(y, "y")?;
    for pt in [x, y] {
        if !p.contains(pt) {
            return Err(Error::NotInterior {
                min_slack: p.slack(pt).min(),
            });
        }
    }
    let d = y - x;
    let len = d.norm();
    if len == 0.0 {
        return Ok(0.0);
    }
    // Chord parameterised as x + t(y − x): y at t = 1, q at t = 1 + beyond_y,
    // p at t = −beyond_x.
    let t_q = ray_exit(p, x, &d).ok_or(Error::Unbounded)?;
    let t_p = ray_exit(p, x, &(-&d)).ok_or(Error::Unbounded)?;
    let xy = 1.0;
    let pq = t_p + t_q;
    let px = t_p;
    let yq = t_q - 1.0;
    Ok((1.0 + xy * pq / (px * yq)).ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn hypercube_center_is_flat() {
        let p = Polytope::hypercube(3).unwrap();
        let pt = ManifoldPoint::new(&p, DVector::zeros(3)).unwrap();
        let e1 = v(&[1.0, 0.0, 0.0]);
        assert!(christoffel_action(&pt, &e1, &e1).amax() < 1e-15);
        assert!(geodesic_rhs(&pt, &v(&[0.3, -0.2, 1.0])).amax() < 1e-15);
        assert!(ricci(&pt, &v(&[0.3, -0.2, 1.0])).abs() < 1e-14);
    }

    #[test]
    fn curvature_matrix_trace_is_ricci() {
        let p = Polytope::standard_simplex(3).unwrap();
        let pt = ManifoldPoint::new(&p, v(&[0.1, 0.2, 0.3])).unwrap();
        let u = v(&[0.4, -1.0, 0.2]);
        let op = frame_curvature_matrix(&pt, &u, &pt.orthonormal_frame(), &Tolerances::default())
            .unwrap();
        let ric = ricci(&pt, &u);
        assert!((op.trace() - ric).abs() <= 1e-10 * ric.abs().max(1.0));
    }

    #[test]
    fn non_orthonormal_frame_rejected() {
        let p = Polytope::standard_simplex(2).unwrap();
        let pt = ManifoldPoint::new(&p, v(&[0.2, 0.2])).unwrap();
        let err = frame_curvature_matrix(
            &pt,
            &v(&[1.0, 0.0]),
            &DMatrix::identity(2, 2),
            &Tolerances::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::FrameNotOrthonormal { .. }));
    }

    #[test]
    fn hilbert_interval() {
        let p = Polytope::from_box(&[-1.0], &[1.0]).unwrap();
        let d = hilbert_distance(&p, &v(&[0.0]), &v(&[0.5])).unwrap();
        assert!((d - 3f64.ln()).abs() < 1e-14);
        assert_eq!(hilbert_distance(&p, &v(&[0.3]), &v(&[0.3])).unwrap(), 0.0);
    }

    #[test]
    fn hilbert_unbounded() {
        let p = Polytope::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[0.0, 0.0]).unwrap();
        let err = hilbert_distance(&p, &v(&[1.0, 1.0]), &v(&[2.0, 1.0])).unwrap_err();
        assert_eq!(err, Error::Unbounded);
    }

    #[test]
    fn v_term_unit_slack_n1() {
        // n = 1: ‖s‖₄·1 + ‖s‖_∞ / √h.
        let h = 0.04;
        assert!((auxiliary_v_term(&[1.0], h, 1) - (1.0 + 1.0 / 0.2)).abs() < 1e-14);
        assert_eq!(auxiliary_v_term(&[0.0, 0.0], h, 2), 0.0);
    }
}
