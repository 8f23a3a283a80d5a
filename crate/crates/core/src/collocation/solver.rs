use nalgebra::{DMatrix, DVector};

use super::basis::standard_basis;
use super::curve::{node_values, PiecewiseCurve, PolyCurve};
use crate::config::{CollocationConfig, NormKind};
use crate::error::{Error, Result};

/// Tolerances are never tighter than this multiple of machine epsilon
/// times the state scale; below it the stopping test only sees rounding.
const TOL_FLOOR: f64 = 1e3 * f64::EPSILON;

/// Statistics of one collocation solve.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// Iteration budget `Z` derived from the problem scale.
    pub iteration_cap: usize,
    /// `max_i ‖p'(c_i) − F(p(c_i), c_i)‖_p` of the returned curve.
    pub residual: f64,
    /// Tolerance actually enforced after flooring.
    pub tolerance: f64,
    /// `‖ζ^{(z+1)} − ζ^{(z)}‖_{∞;p}` per iteration.
    pub changes: Vec<f64>,
}

impl SolveReport {
    /// Ratios of consecutive node-value changes.
    pub fn contraction_ratios(&self) -> Vec<f64> {
        self.changes
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .collect()
    }
}

fn row_norm(kind: NormKind, m: &DMatrix<f64>, i: usize) -> f64 {
    let row = m.row(i);
    match kind {
        NormKind::L2 => row.norm(),
        NormKind::L4 => row.iter().map(|x| x.powi(4)).sum::<f64>().powf(0.25),
        NormKind::Inf => row.amax(),
    }
}

/// `‖·‖_{∞;p}`: the largest per-node p-norm.
pub(crate) fn max_row_norm(kind: NormKind, m: &DMatrix<f64>) -> f64 {
    let mut out = 0.0_f64;
    for i in 0..m.nrows() {
        let r = row_norm(kind, m, i);
        if r.is_nan() {
            return f64::NAN;
        }
        out = out.max(r);
    }
    out
}

fn eval_nodes<F>(
    f: &mut F,
    times: &[f64],
    states: &DMatrix<f64>,
    out: &mut DMatrix<f64>,
) -> Result<()>
where
    F: FnMut(usize, f64, &DVector<f64>) -> Result<DVector<f64>>,
{
    let n = states.ncols();
    for (i, &t) in times.iter().enumerate() {
        let x = states.row(i).transpose();
        let fx = f(i, t, &x)?;
        if fx.len() != n {
            return Err(Error::DimensionMismatch {
                what: "ODE right-hand side",
                expected: n,
                found: fx.len(),
            });
        }
        if fx.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("ODE right-hand side"));
        }
        out.set_row(i, &fx.transpose());
    }
    Ok(())
}

/// Single-interval first-order solve on `[0, len]` with a callback that
/// also receives the node index (ascending node order).
///
/// The callback is always last invoked at the node values of the returned
/// curve, so callers may cache per-node work done inside it.
pub fn solve_first_order_indexed<F>(
    mut f: F,
    v: &DVector<f64>,
    len: f64,
    tolerance: f64,
    cfg: &CollocationConfig,
) -> Result<(PolyCurve, SolveReport)>
where
    F: FnMut(usize, f64, &DVector<f64>) -> Result<DVector<f64>>,
{
    cfg.validate()?;
    if !(len > 0.0 && len.is_finite()) {
        return Err(Error::InvalidInput("interval length must be positive".into()));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("initial value"));
    }
    let d = cfg.degree;
    let n = v.len();
    let basis = standard_basis(d);
    let times: Vec<f64> = basis.tau.iter().map(|t| 0.5 * len * (1.0 + t)).collect();
    let tol = tolerance.max(TOL_FLOOR * (1.0 + v.amax()));

    let mut zeta = DMatrix::zeros(d, n);
    for mut row in zeta.row_iter_mut() {
        row.copy_from(&v.transpose());
    }
    let mut fvals = DMatrix::zeros(d, n);
    eval_nodes(&mut f, &times, &zeta, &mut fvals)?;

    let k = 4000.0 * len * max_row_norm(cfg.norm, &fvals);
    let cap = if k > tol {
        ((k / tol).log2().ceil() as usize).clamp(1, cfg.max_iters)
    } else {
        1
    };

    // ζ⁽⁰⁾ = v + T(v̄).
    zeta = node_values(v, len, &basis, &fvals);
    eval_nodes(&mut f, &times, &zeta, &mut fvals)?;

    let mut report = SolveReport {
        iteration_cap: cap,
        tolerance: tol,
        ..SolveReport::default()
    };
    let mut prev_f = fvals.clone();
    let mut new_f = DMatrix::zeros(d, n);
    let mut increases = 0;
    for _ in 0..cap {
        let new_zeta = node_values(v, len, &basis, &fvals);
        let change = max_row_norm(cfg.norm, &(&new_zeta - &zeta));
        if !change.is_finite() {
            return Err(Error::NonFinite("collocation iterate"));
        }
        eval_nodes(&mut f, &times, &new_zeta, &mut new_f)?;
        report.residual = max_row_norm(cfg.norm, &(&new_f - &fvals));
        std::mem::swap(&mut prev_f, &mut fvals);
        std::mem::swap(&mut fvals, &mut new_f);
        zeta = new_zeta;
        report.iterations += 1;
        if let Some(&last) = report.changes.last() {
            if change > last {
                increases += 1;
                if increases >= cfg.residual_checks {
                    return Err(Error::NonContraction);
                }
            } else {
                increases = 0;
            }
        }
        report.changes.push(change);
        if change < tol / 10.0 {
            break;
        }
    }
    if report.iterations == 0 {
        report.residual = 0.0;
    }
    if !(len * report.residual <= tol) {
        return Err(Error::NotConverged {
            residual: report.residual,
        });
    }
    Ok((PolyCurve::from_parts(v.clone(), len, basis, zeta, prev_f), report))
}

/// Solve `u' = F(u, t)`, `u(0) = v` on `[0, cfg.interval]`.
pub fn collocation_first_order<F>(
    f: F,
    v: &DVector<f64>,
    cfg: &CollocationConfig,
) -> Result<PolyCurve>
where
    F: Fn(&DVector<f64>, f64) -> DVector<f64>,
{
    solve_first_order(f, v, cfg).map(|(c, _)| c)
}

/// As [`collocation_first_order`], also returning the solve statistics.
pub fn solve_first_order<F>(
    f: F,
    v: &DVector<f64>,
    cfg: &CollocationConfig,
) -> Result<(PolyCurve, SolveReport)>
where
    F: Fn(&DVector<f64>, f64) -> DVector<f64>,
{
    solve_first_order_indexed(|_, t, x| Ok(f(x, t)), v, cfg.interval, cfg.tolerance, cfg)
}

/// Position and velocity curves of a second-order solve.
#[derive(Debug, Clone)]
pub struct SecondOrderCurve {
    pub position: PolyCurve,
    pub velocity: PolyCurve,
}

/// Single-interval solve of `u'' = F(u, u', t)` with node indices.
///
/// Reduced to first order on the state `(u, ℓ·u')`; the factor `ℓ` keeps
/// both halves of the state on the same scale over the interval.
pub fn solve_second_order_indexed<F>(
    mut f: F,
    v: &DVector<f64>,
    w: &DVector<f64>,
    len: f64,
    tolerance: f64,
    cfg: &CollocationConfig,
) -> Result<(SecondOrderCurve, SolveReport)>
where
    F: FnMut(usize, f64, &DVector<f64>, &DVector<f64>) -> Result<DVector<f64>>,
{
    let n = v.len();
    if w.len() != n {
        return Err(Error::DimensionMismatch {
            what: "initial velocity",
            expected: n,
            found: w.len(),
        });
    }
    let s = len;
    let mut x0 = DVector::zeros(2 * n);
    x0.rows_mut(0, n).copy_from(v);
    x0.rows_mut(n, n).copy_from(&(w * s));
    let rhs = |i: usize, t: f64, x: &DVector<f64>| -> Result<DVector<f64>> {
        let u = x.rows(0, n).into_owned();
        let up = x.rows(n, n) / s;
        let acc = f(i, t, &u, &up)?;
        if acc.len() != n {
            return Err(Error::DimensionMismatch {
                what: "second-order right-hand side",
                expected: n,
                found: acc.len(),
            });
        }
        let mut out = DVector::zeros(2 * n);
        out.rows_mut(0, n).copy_from(&up);
        out.rows_mut(n, n).copy_from(&(acc * s));
        Ok(out)
    };
    let (curve, report) = solve_first_order_indexed(rhs, &x0, len, tolerance, cfg)?;
    Ok((
        SecondOrderCurve {
            position: curve.components(0, n, 1.0),
            velocity: curve.components(n, n, 1.0 / s),
        },
        report,
    ))
}

/// Solve `u'' = F(u', u, t)`, `u(0) = v`, `u'(0) = w` on `[0, cfg.interval]`.
pub fn collocation_second_order<F>(
    f: F,
    v: &DVector<f64>,
    w: &DVector<f64>,
    cfg: &CollocationConfig,
) -> Result<SecondOrderCurve>
where
    F: Fn(&DVector<f64>, &DVector<f64>, f64) -> DVector<f64>,
{
    solve_second_order_indexed(
        |_, t, u, up| Ok(f(up, u, t)),
        v,
        w,
        cfg.interval,
        cfg.tolerance,
        cfg,
    )
    .map(|(c, _)| c)
}

/// Errors after which a shorter interval may succeed.
pub(crate) fn retryable(e: &Error) -> bool {
    matches!(e, Error::NonContraction | Error::NotConverged { .. }) || e.is_domain_exit()
}

/// Step through `[0, total]` in pieces of length about `step`, tightening
/// the per-step tolerance geometrically toward the start (`ε·½^{N−k}` for
/// step `k` of `N`) and halving any piece whose solve fails with a
/// retryable error, at most `max_halvings` times per piece.
///
/// Returns the pieces in order together with the number of halvings.
pub(crate) fn march<S, T, P>(
    total: f64,
    step: f64,
    tolerance: f64,
    max_halvings: usize,
    init: S,
    mut solve: P,
) -> Result<(Vec<T>, S, usize)>
where
    P: FnMut(f64, f64, f64, &S) -> Result<(T, S)>,
{
    if !(total >= 0.0 && total.is_finite()) {
        return Err(Error::InvalidInput("integration length must be non-negative".into()));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidInput("step length must be positive".into()));
    }
    if total == 0.0 {
        return Ok((Vec::new(), init, 0));
    }
    let steps = ((total / step) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let len = total / steps as f64;
    // Pending pieces, last element processed first.
    let mut pending: Vec<(f64, f64, f64, usize)> = (1..=steps)
        .rev()
        .map(|k| {
            let tol = tolerance * 0.5f64.powi((steps - k).min(1000) as i32);
            ((k - 1) as f64 * len, len, tol, 0)
        })
        .collect();
    let mut out = Vec::new();
    let mut state = init;
    let mut halvings = 0;
    while let Some((t0, l, tol, depth)) = pending.pop() {
        match solve(t0, l, tol, &state) {
            Ok((piece, next)) => {
                out.push(piece);
                state = next;
            }
            Err(e) if retryable(&e) && depth < max_halvings => {
                halvings += 1;
                let half = 0.5 * l;
                pending.push((t0 + half, half, tol, depth + 1));
                pending.push((t0, half, tol, depth + 1));
            }
            Err(e) => return Err(e),
        }
    }
    Ok((out, state, halvings))
}

/// Result of a multi-interval solve.
#[derive(Debug, Clone)]
pub struct MultistepSolution {
    pub curve: PiecewiseCurve,
    pub end: DVector<f64>,
    pub halvings: usize,
    pub reports: Vec<SolveReport>,
}

/// Solve `u' = F(u, t)` over `[0, total]` by consecutive collocation
/// intervals.
///
/// The nominal interval is `1/(2000·L)` when a Lipschitz estimate `L` is
/// given, otherwise `cfg.interval`; failing intervals are halved up to
/// `cfg.max_halvings` times.
pub fn collocation_multistep<F>(
    f: F,
    v: &DVector<f64>,
    total: f64,
    cfg: &CollocationConfig,
    lipschitz: Option<f64>,
) -> Result<MultistepSolution>
where
    F: Fn(&DVector<f64>, f64) -> DVector<f64>,
{
    cfg.validate()?;
    let step = match lipschitz {
        Some(l) if l > 0.0 && l.is_finite() => 1.0 / (2000.0 * l),
        Some(_) => return Err(Error::InvalidInput("Lipschitz estimate must be positive".into())),
        None => cfg.interval,
    };
    let (pieces, end, halvings) = march(
        total,
        step,
        cfg.tolerance,
        cfg.max_halvings,
        v.clone(),
        |t0, len, tol, state: &DVector<f64>| {
            let (curve, report) =
                solve_first_order_indexed(|_, t, x| Ok(f(x, t0 + t)), state, len, tol, cfg)?;
            let end = curve.end();
            Ok(((curve, report), end))
        },
    )?;
    let mut curve = PiecewiseCurve::new();
    let mut reports = Vec::with_capacity(pieces.len());
    for (c, r) in pieces {
        curve.push(c);
        reports.push(r);
    }
    Ok(MultistepSolution {
        curve,
        end,
        halvings,
        reports,
    })
}
