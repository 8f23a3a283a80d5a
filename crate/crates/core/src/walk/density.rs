use nalgebra::DVector;

use crate::point::ManifoldPoint;

/// Log of the one-step density `p(x → y)` for the geodesic branch with
/// unscaled initial velocity `v` (`exp_x(v) = y`):
///
/// `−log det dexp + ½ log det g(y) − (n/2) log(2πh) − ‖v − (h/2)μ(x)‖²_x / (2h)`.
pub fn transition_log_density(
    from: &ManifoldPoint,
    v: &DVector<f64>,
    to: &ManifoldPoint,
    logdet_dexp: f64,
    h: f64,
) -> f64 {
    let n = from.dim() as f64;
    let centered = v - from.drift() * (0.5 * h);
    let quad = from.metric_inner(&centered, &centered);
    -logdet_dexp + 0.5 * to.log_det_metric()
        - 0.5 * n * (2.0 * std::f64::consts::PI * h).ln()
        - quad / (2.0 * h)
}

/// Expanded form of `log p(y → x) − log p(x → y)`, valid when
/// `‖v_x‖_x = ‖v_y‖_y`.
pub fn formula_log_ratio(
    x: &ManifoldPoint,
    v_x: &DVector<f64>,
    y: &ManifoldPoint,
    v_y: &DVector<f64>,
    logdet_fwd: f64,
    logdet_rev: f64,
    h: f64,
) -> f64 {
    let mx = x.drift();
    let my = y.drift();
    logdet_fwd - logdet_rev + 0.5 * x.log_det_metric() - 0.5 * y.log_det_metric()
        - 0.5 * x.metric_inner(v_x, mx)
        + h / 8.0 * x.metric_inner(mx, mx)
        + 0.5 * y.metric_inner(v_y, my)
        - h / 8.0 * y.metric_inner(my, my)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::Polytope;

    #[test]
    fn interval_center_plug_in() {
        let p = Polytope::from_box(&[-1.0], &[1.0]).unwrap();
        let x = ManifoldPoint::new(&p, DVector::from_vec(vec![0.0])).unwrap();
        let h = 0.01;
        let lp = transition_log_density(&x, &DVector::zeros(1), &x, 0.0, h);
        let expected = 0.5 * 2f64.ln() - 0.5 * (2.0 * std::f64::consts::PI * h).ln();
        assert!((lp - expected).abs() < 1e-14);
    }
}
