#![allow(dead_code)]

use hessian_walk::{DMatrix, DVector, Polytope};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Random bounded polytope containing the origin: `n` perturbed
/// coordinate pairs plus `m − 2n` random facets, all at distance in
/// `[0.5, 1.5]` from the origin.
pub fn random_polytope(rng: &mut impl Rng, n: usize, m: usize) -> Polytope {
    assert!(m >= 2 * n);
    let mut a = DMatrix::zeros(m, n);
    for i in 0..n {
        for (k, sign) in [(2 * i, 1.0), (2 * i + 1, -1.0)] {
            for j in 0..n {
                a[(k, j)] = 0.2 * rng.sample::<f64, _>(StandardNormal);
            }
            a[(k, i)] = sign;
        }
    }
    for k in 2 * n..m {
        for j in 0..n {
            a[(k, j)] = rng.sample::<f64, _>(StandardNormal);
        }
    }
    for mut row in a.row_iter_mut() {
        let norm = row.norm();
        row /= norm;
    }
    let b = DVector::from_fn(m, |_, _| -(0.5 + rng.random::<f64>()));
    Polytope::new(a, b).unwrap()
}

/// Point `t·y` with `y` uniform in a box around the origin conditioned on
/// lying inside, `t ∈ [0.2, 0.8]`.
pub fn random_interior(rng: &mut impl Rng, p: &Polytope) -> DVector<f64> {
    let n = p.n();
    loop {
        let y = DVector::from_fn(n, |_, _| 3.0 * (2.0 * rng.random::<f64>() - 1.0));
        if p.contains(&y) {
            let t = 0.2 + 0.6 * rng.random::<f64>();
            return y * t;
        }
    }
}

/// Classical fixed-step fourth-order Runge–Kutta on `[0, t]`.
pub fn rk4<F: Fn(f64, &DVector<f64>) -> DVector<f64>>(
    f: F,
    y0: &DVector<f64>,
    t: f64,
    steps: usize,
) -> DVector<f64> {
    let h = t / steps as f64;
    let mut y = y0.clone();
    for k in 0..steps {
        let s = k as f64 * h;
        let k1 = f(s, &y);
        let k2 = f(s + 0.5 * h, &(&y + &k1 * (0.5 * h)));
        let k3 = f(s + 0.5 * h, &(&y + &k2 * (0.5 * h)));
        let k4 = f(s + h, &(&y + &k3 * h));
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    y
}

/// Optimum of `min cᵀx` s.t. `Ax = b`, `x ≥ 0` by enumerating all bases.
pub fn lp_vertex_opt(a: &DMatrix<f64>, b: &DVector<f64>, c: &DVector<f64>) -> f64 {
    let (m, n) = a.shape();
    let mut best = f64::INFINITY;
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        let sub = DMatrix::from_fn(m, m, |i, j| a[(i, idx[j])]);
        if let Some(xb) = sub.lu().solve(b) {
            if xb.iter().all(|&v| v >= -1e-12 && v.is_finite()) {
                let obj: f64 = idx.iter().zip(xb.iter()).map(|(&j, v)| c[j] * v).sum();
                best = best.min(obj);
            }
        }
        // Next m-combination of 0..n.
        let mut k = m;
        while k > 0 && idx[k - 1] == n - m + k - 1 {
            k -= 1;
        }
        if k == 0 {
            return best;
        }
        idx[k - 1] += 1;
        for j in k..m {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Median of the absolute values.
pub fn median_abs(values: &[f64]) -> f64 {
    let mut v: Vec<f64> = values.iter().map(|x| x.abs()).collect();
    v.sort_by(|a, b| a.total_cmp(b));
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

pub fn vec_rel_err(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).amax() / a.amax().max(b.amax()).max(1e-300)
}

/// Optimal basis of `min cᵀx, Ax = b, x ≥ 0` by vertex enumeration, with
/// the smallest basic value and the smallest relative reduced cost
/// `min_{j ∉ B} r_j / c_j` where `r = c − Aᵀλ`, `λ = B⁻ᵀ c_B`.
pub struct LpVertex {
    pub opt: f64,
    pub basis: Vec<usize>,
    pub min_basic: f64,
    pub min_relative_reduced_cost: f64,
}

pub fn lp_vertex(a: &DMatrix<f64>, b: &DVector<f64>, c: &DVector<f64>) -> Option<LpVertex> {
    let (m, n) = a.shape();
    let mut best: Option<(f64, Vec<usize>, DVector<f64>)> = None;
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        let sub = DMatrix::from_fn(m, m, |i, j| a[(i, idx[j])]);
        if let Some(xb) = sub.lu().solve(b) {
            if xb.iter().all(|&v| v >= -1e-12 && v.is_finite()) {
                let obj: f64 = idx.iter().zip(xb.iter()).map(|(&j, v)| c[j] * v).sum();
                if best.as_ref().is_none_or(|(o, _, _)| obj < *o) {
                    best = Some((obj, idx.clone(), xb));
                }
            }
        }
        let mut k = m;
        while k > 0 && idx[k - 1] == n - m + k - 1 {
            k -= 1;
        }
        if k == 0 {
            break;
        }
        idx[k - 1] += 1;
        for j in k..m {
            idx[j] = idx[j - 1] + 1;
        }
    }
    let (opt, basis, xb) = best?;
    let bmat = DMatrix::from_fn(m, m, |i, j| a[(i, basis[j])]);
    let cb = DVector::from_fn(m, |j, _| c[basis[j]]);
    let lambda = bmat.transpose().lu().solve(&cb)?;
    let r = c - a.transpose() * lambda;
    let min_rel = (0..n)
        .filter(|j| !basis.contains(j))
        .map(|j| r[j] / c[j])
        .fold(f64::INFINITY, f64::min);
    Some(LpVertex {
        opt,
        basis,
        min_basic: xb.min(),
        min_relative_reduced_cost: min_rel,
    })
}
