use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::config::Tolerances;
use crate::error::Result;
use crate::point::ManifoldPoint;
use crate::polytope::Polytope;

/// One Metropolis-filtered Dikin step `y = x + r·L⁻ᵀz/√n`.
///
/// Returns the new state and whether the proposal was accepted.
pub fn dikin_walk_step<R: Rng + ?Sized>(
    p: &Polytope,
    x: &ManifoldPoint,
    r: f64,
    tol: &Tolerances,
    rng: &mut R,
) -> (ManifoldPoint, bool) {
    let n = x.dim();
    let z = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let u: f64 = rng.random();
    if r == 0.0 {
        return (x.clone(), true);
    }
    let step = x.inverse_factor_transpose(&z) * (r / (n as f64).sqrt());
    let y = match ManifoldPoint::with_tolerances(p, x.x() + &step, tol) {
        Ok(y) => y,
        Err(_) => return (x.clone(), false),
    };
    let nf = n as f64;
    let log_ratio = 0.5 * (y.log_det_metric() - x.log_det_metric())
        - 0.5 * (y.metric_inner(&step, &step) - x.metric_inner(&step, &step)) * nf / (r * r);
    if u.ln() < log_ratio {
        (y, true)
    } else {
        (x.clone(), false)
    }
}

/// Dikin chain of `steps` iterations (no burn-in); returns the visited
/// states and the acceptance rate.
pub fn run_dikin_chain<R: Rng + ?Sized>(
    p: &Polytope,
    start: &DVector<f64>,
    steps: usize,
    r: f64,
    tol: &Tolerances,
    rng: &mut R,
) -> Result<(Vec<DVector<f64>>, f64)> {
    let mut x = ManifoldPoint::with_tolerances(p, start.clone(), tol)?;
    let mut out = Vec::with_capacity(steps);
    let mut acc = 0usize;
    for _ in 0..steps {
        let (next, ok) = dikin_walk_step(p, &x, r, tol, rng);
        if ok {
            acc += 1;
        }
        x = next;
        out.push(x.x().clone());
    }
    let rate = if steps == 0 { 0.0 } else { acc as f64 / steps as f64 };
    Ok((out, rate))
}
