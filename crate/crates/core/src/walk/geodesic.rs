//! Geodesics, parallel frames and Jacobi determinants along a solved path.

use nalgebra::{DMatrix, DVector};

use crate::collocation::{
    march, solve_first_order_indexed, solve_second_order_indexed, PolyCurve, END_SLACK,
};
use crate::config::{CollocationConfig, Tolerances};
use crate::error::{Error, Result};
use crate::geometry::{auxiliary_v_term, curvature_in_frame, geodesic_rhs, parallel_transport_rhs_matrix};
use crate::point::{frame_deviation, orthonormalize_in_metric, ManifoldPoint};
use crate::polytope::Polytope;

/// Uniform samples (besides the nodes) used for exit checks and `V(γ)`.
pub const CURVE_SAMPLES: usize = 32;

/// One collocation interval of a geodesic.
#[derive(Debug, Clone)]
pub struct GeodesicSegment {
    /// Start time on the global clock.
    pub t0: f64,
    pub position: PolyCurve,
    pub velocity: PolyCurve,
    /// Points at the node values of `position`, ascending node order.
    pub points: Vec<ManifoldPoint>,
    /// Point at the end of the segment.
    pub end: ManifoldPoint,
}

impl GeodesicSegment {
    pub fn len(&self) -> f64 {
        self.position.len()
    }

    pub fn node_velocity(&self, i: usize) -> DVector<f64> {
        self.velocity.node_value(i)
    }
}

/// A geodesic `γ : [0, ℓ] → P` stored as consecutive polynomial pieces.
#[derive(Debug, Clone)]
pub struct GeodesicPath {
    pub segments: Vec<GeodesicSegment>,
    pub len: f64,
    pub start: ManifoldPoint,
    pub end: ManifoldPoint,
    pub end_velocity: DVector<f64>,
    pub initial_velocity: DVector<f64>,
    /// Interval halvings spent by the adaptive solver.
    pub halvings: usize,
}

impl GeodesicPath {
    fn locate(&self, t: f64) -> Result<(&GeodesicSegment, f64)> {
        if !(t >= 0.0 && t <= self.len * END_SLACK) || self.segments.is_empty() {
            return Err(Error::OutOfRange { t, len: self.len });
        }
        let t = t.min(self.len);
        let k = self
            .segments
            .partition_point(|s| s.t0 <= t)
            .saturating_sub(1);
        let seg = &self.segments[k];
        Ok((seg, (t - seg.t0).clamp(0.0, seg.len())))
    }

    pub fn position(&self, t: f64) -> Result<DVector<f64>> {
        if self.segments.is_empty() {
            return if t == 0.0 {
                Ok(self.start.x().clone())
            } else {
                Err(Error::OutOfRange { t, len: self.len })
            };
        }
        let (seg, local) = self.locate(t)?;
        seg.position.eval(local)
    }

    pub fn velocity(&self, t: f64) -> Result<DVector<f64>> {
        if self.segments.is_empty() {
            return Ok(self.initial_velocity.clone());
        }
        let (seg, local) = self.locate(t)?;
        seg.velocity.eval(local)
    }

    fn sample_times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=CURVE_SAMPLES).map(move |k| self.len * k as f64 / CURVE_SAMPLES as f64)
    }

    /// Fails with [`Error::GeodesicExit`] unless every sample and node of
    /// the curve has strictly positive slack.
    pub fn check_inside(&self, p: &Polytope) -> Result<()> {
        for t in self.sample_times() {
            let x = self.position(t)?;
            if !p.contains(&x) {
                return Err(Error::GeodesicExit);
            }
        }
        Ok(())
    }

    /// `V(γ)` over the nodes and the uniform samples.
    pub fn auxiliary_v(&self, p: &Polytope, h: f64) -> Result<f64> {
        let n = p.n();
        let mut best = 0.0_f64;
        for seg in &self.segments {
            for (i, pt) in seg.points.iter().enumerate() {
                let s = pt.slack_velocity(&seg.node_velocity(i));
                best = best.max(auxiliary_v_term(s.as_slice(), h, n));
            }
        }
        for t in self.sample_times() {
            let x = self.position(t)?;
            let v = self.velocity(t)?;
            let s = p.slack(&x);
            let av = p.a() * v;
            let sv: Vec<f64> = av.iter().zip(s.iter()).map(|(a, b)| a / b).collect();
            best = best.max(auxiliary_v_term(&sv, h, n));
        }
        Ok(best)
    }

    /// All node times on the global clock with the matching point and
    /// velocity.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, &ManifoldPoint, DVector<f64>)> + '_ {
        self.segments.iter().flat_map(|seg| {
            seg.position
                .node_times()
                .into_iter()
                .enumerate()
                .map(move |(i, c)| (seg.t0 + c, &seg.points[i], seg.node_velocity(i)))
        })
    }
}

/// Solve `γ'' = g⁻¹A_γᵀ s_{γ'}²` from `start` with `γ'(0) = velocity` over
/// `[0, len]`.
pub fn solve_geodesic(
    p: &Polytope,
    start: &ManifoldPoint,
    velocity: &DVector<f64>,
    len: f64,
    cfg: &CollocationConfig,
    max_halvings: usize,
    tol: &Tolerances,
) -> Result<GeodesicPath> {
    p.check_dim(velocity, "velocity")?;
    if velocity.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("velocity"));
    }
    let d = cfg.degree;
    let (segments, (end, end_velocity), halvings) = march(
        len,
        cfg.interval,
        cfg.tolerance,
        max_halvings,
        (start.clone(), velocity.clone()),
        |t0, l, eps, (pt, vel): &(ManifoldPoint, DVector<f64>)| {
            let mut cache: Vec<Option<ManifoldPoint>> = vec![None; d];
            let (curve, _) = solve_second_order_indexed(
                |i, _, u, up| {
                    let q = ManifoldPoint::with_tolerances(p, u.clone(), tol)?;
                    let acc = geodesic_rhs(&q, up);
                    cache[i] = Some(q);
                    Ok(acc)
                },
                pt.x(),
                vel,
                l,
                eps,
                cfg,
            )?;
            let points: Vec<ManifoldPoint> = cache
                .into_iter()
                .map(|c| c.expect("every node is evaluated"))
                .collect();
            let end = ManifoldPoint::with_tolerances(p, curve.position.end(), tol)
                .map_err(|_| Error::GeodesicExit)?;
            let end_vel = curve.velocity.end();
            Ok((
                GeodesicSegment {
                    t0,
                    position: curve.position,
                    velocity: curve.velocity,
                    points,
                    end: end.clone(),
                },
                (end, end_vel),
            ))
        },
    )?;
    Ok(GeodesicPath {
        segments,
        len,
        start: start.clone(),
        end,
        end_velocity,
        initial_velocity: velocity.clone(),
        halvings,
    })
}

fn flatten(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(m.as_slice())
}

fn unflatten(v: &DVector<f64>, n: usize) -> DMatrix<f64> {
    DMatrix::from_column_slice(n, n, v.as_slice())
}

/// Parallel frame and curvature data along a geodesic.
#[derive(Debug, Clone)]
pub struct FrameTransport {
    /// `R(t)` at every node, grouped by segment, ascending node order.
    pub curvature: Vec<Vec<DMatrix<f64>>>,
    /// Frame at the end of the path.
    pub final_frame: DMatrix<f64>,
    /// Largest orthonormality defect seen before any correction.
    pub max_deviation: f64,
    /// Number of re-orthonormalizations applied.
    pub reorthonormalizations: usize,
    /// `max_t ‖R(t)‖_F` over the nodes.
    pub max_curvature_norm: f64,
}

/// Transport the frame `L_x⁻ᵀ` along `path` and evaluate `R(t)` at nodes.
pub fn transport_frame(
    path: &GeodesicPath,
    cfg: &CollocationConfig,
    tol: &Tolerances,
) -> Result<FrameTransport> {
    let n = path.start.dim();
    let mut frame = path.start.orthonormal_frame();
    let mut out = FrameTransport {
        curvature: Vec::with_capacity(path.segments.len()),
        final_frame: frame.clone(),
        max_deviation: 0.0,
        reorthonormalizations: 0,
        max_curvature_norm: 0.0,
    };
    for seg in &path.segments {
        let velocities: Vec<DVector<f64>> =
            (0..seg.points.len()).map(|i| seg.node_velocity(i)).collect();
        let (curve, _) = solve_first_order_indexed(
            |i, _, x| {
                let m = unflatten(x, n);
                Ok(flatten(&parallel_transport_rhs_matrix(&seg.points[i], &velocities[i], &m)))
            },
            &flatten(&frame),
            seg.len(),
            cfg.tolerance,
            cfg,
        )?;
        let mut rs = Vec::with_capacity(seg.points.len());
        for (i, pt) in seg.points.iter().enumerate() {
            let mut xi = unflatten(&curve.node_value(i), n);
            let dev = frame_deviation(pt, &xi);
            out.max_deviation = out.max_deviation.max(dev);
            if dev > tol.frame_tol {
                orthonormalize_in_metric(pt, &mut xi)?;
                out.reorthonormalizations += 1;
            }
            let r = curvature_in_frame(pt, &velocities[i], &xi);
            out.max_curvature_norm = out.max_curvature_norm.max(r.norm());
            rs.push(r);
        }
        out.curvature.push(rs);
        frame = unflatten(&curve.end(), n);
        let dev = frame_deviation(&seg.end, &frame);
        out.max_deviation = out.max_deviation.max(dev);
        if dev > tol.frame_tol {
            orthonormalize_in_metric(&seg.end, &mut frame)?;
            out.reorthonormalizations += 1;
        }
        out.final_frame = frame.clone();
    }
    Ok(out)
}

/// `log det Ψ(ℓ)` for `Ψ'' + R(t)Ψ = 0`, `Ψ(0) = 0`, `Ψ'(0) = I/ℓ`, with
/// `R` known at the nodes of each segment (`curvature[k][i]`).
///
/// With `reverse` the path is traversed from its end, which for symmetric
/// node sets maps node `i` of a segment to node `d − 1 − i`.
pub fn jacobi_logdet(
    curvature: &[Vec<DMatrix<f64>>],
    lengths: &[f64],
    total: f64,
    n: usize,
    reverse: bool,
    cfg: &CollocationConfig,
) -> Result<f64> {
    let mut psi = DVector::zeros(n * n);
    let mut dpsi = flatten(&(DMatrix::identity(n, n) / total));
    let order: Vec<usize> = if reverse {
        (0..curvature.len()).rev().collect()
    } else {
        (0..curvature.len()).collect()
    };
    for k in order {
        let rs = &curvature[k];
        let d = rs.len();
        let (curve, _) = solve_second_order_indexed(
            |i, _, u, _| {
                let r = if reverse { &rs[d - 1 - i] } else { &rs[i] };
                Ok(-flatten(&(r * unflatten(u, n))))
            },
            &psi,
            &dpsi,
            lengths[k],
            cfg.tolerance,
            cfg,
        )?;
        psi = curve.position.end();
        dpsi = curve.velocity.end();
    }
    let det = unflatten(&psi, n).lu().determinant();
    if !(det > 0.0) || !det.is_finite() {
        return Err(Error::SingularJacobian);
    }
    Ok(det.ln())
}
