//! Slow reference implementations of the barrier geometry.
//!
//! These build every object densely from its textbook definition (explicit
//! inverses, the m×m projection, third-derivative tensors contracted index
//! by index) and share no code with the fast paths in
//! [`crate::geometry`] and [`crate::point`].

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::polytope::Polytope;

fn slack_checked(p: &Polytope, x: &DVector<f64>) -> Result<DVector<f64>> {
    let s = p.a() * x - p.b();
    if s.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::NotInterior { min_slack: s.min() });
    }
    Ok(s)
}

/// `∇²φ(x) = Σ_i a_i a_iᵀ / s_i²`.
pub fn dense_metric(p: &Polytope, x: &DVector<f64>) -> Result<DMatrix<f64>> {
    let s = slack_checked(p, x)?;
    let n = p.n();
    let mut g = DMatrix::zeros(n, n);
    for (i, row) in p.a().row_iter().enumerate() {
        let a = row.transpose();
        g += &a * a.transpose() / (s[i] * s[i]);
    }
    Ok(g)
}

fn dense_inverse_metric(p: &Polytope, x: &DVector<f64>) -> Result<DMatrix<f64>> {
    dense_metric(p, x)?.try_inverse().ok_or(Error::Singular)
}

/// `P_x = A_x g⁻¹ A_xᵀ` as an explicit m×m matrix.
pub fn dense_projection(p: &Polytope, x: &DVector<f64>) -> Result<DMatrix<f64>> {
    let s = slack_checked(p, x)?;
    let mut ax = p.a().clone();
    for i in 0..ax.nrows() {
        for j in 0..ax.ncols() {
            ax[(i, j)] /= s[i];
        }
    }
    let ginv = dense_inverse_metric(p, x)?;
    Ok(&ax * ginv * ax.transpose())
}

pub fn dense_leverage(p: &Polytope, x: &DVector<f64>) -> Result<DVector<f64>> {
    Ok(dense_projection(p, x)?.diagonal())
}

/// `μ_i = Σ_j Σ_k V_ik (A_x)_kj V_jk` with `V = g⁻¹A_xᵀ`, i.e.
/// `g⁻¹ A_xᵀ diag(P_x)` written out entry by entry.
pub fn dense_drift(p: &Polytope, x: &DVector<f64>) -> Result<DVector<f64>> {
    let s = slack_checked(p, x)?;
    let (m, n) = (p.m(), p.n());
    let ginv = dense_inverse_metric(p, x)?;
    let ax = DMatrix::from_fn(m, n, |k, j| p.a()[(k, j)] / s[k]);
    let v = &ginv * ax.transpose();
    let mut mu = DVector::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                mu[i] += v[(i, k)] * ax[(k, j)] * v[(j, k)];
            }
        }
    }
    Ok(mu)
}

/// `log det ∇²φ(x)` from the eigenvalues.
pub fn log_det_eigen(p: &Polytope, x: &DVector<f64>) -> Result<f64> {
    let g = dense_metric(p, x)?;
    let eig = g.symmetric_eigenvalues();
    if eig.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::Singular);
    }
    Ok(eig.iter().map(|e| e.ln()).sum())
}

/// `−g⁻¹∇ψ` with `ψ = ½ log det ∇²φ`, gradient by central differences
/// with step `rel_step · min_i s_i`.
pub fn drift_finite_difference(p: &Polytope, x: &DVector<f64>, rel_step: f64) -> Result<DVector<f64>> {
    let n = p.n();
    // Step relative to the distance to the nearest facet.
    let step = rel_step * slack_checked(p, x)?.min();
    let mut grad = DVector::zeros(n);
    for i in 0..n {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += step;
        xm[i] -= step;
        grad[i] = 0.5 * (log_det_eigen(p, &xp)? - log_det_eigen(p, &xm)?) / (2.0 * step);
    }
    Ok(-dense_inverse_metric(p, x)? * grad)
}

/// `φ_ijk = −2 Σ_l a_li a_lj a_lk / s_l³` as a flat `n³` array
/// (`i + n·j + n²·k`).
pub fn third_derivative(p: &Polytope, x: &DVector<f64>) -> Result<Vec<f64>> {
    let s = slack_checked(p, x)?;
    let n = p.n();
    let mut t = vec![0.0; n * n * n];
    for (l, row) in p.a().row_iter().enumerate() {
        let c = -2.0 / (s[l] * s[l] * s[l]);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    t[i + n * j + n * n * k] += c * row[i] * row[j] * row[k];
                }
            }
        }
    }
    Ok(t)
}

/// `Σ_ijk u_i v_j Γ^k_ij e_k` with `Γ^k_ij = ½ Σ_l g^{kl} φ_ijl`.
pub fn christoffel_index_sum(
    p: &Polytope,
    x: &DVector<f64>,
    u: &DVector<f64>,
    v: &DVector<f64>,
) -> Result<DVector<f64>> {
    let n = p.n();
    let phi = third_derivative(p, x)?;
    let ginv = dense_inverse_metric(p, x)?;
    let mut out = DVector::zeros(n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut gamma = 0.0;
                for l in 0..n {
                    gamma += 0.5 * ginv[(k, l)] * phi[i + n * j + n * n * l];
                }
                out[k] += u[i] * v[j] * gamma;
            }
        }
    }
    Ok(out)
}

/// `Σ R_klij u_i v_j w_l z_k` with
/// `R_klij = ¼ Σ_pq g^{pq}(φ_jkp φ_ilq − φ_ikp φ_jlq)`.
pub fn riemann_index_sum(
    p: &Polytope,
    x: &DVector<f64>,
    u: &DVector<f64>,
    v: &DVector<f64>,
    w: &DVector<f64>,
    z: &DVector<f64>,
) -> Result<f64> {
    let n = p.n();
    let phi = third_derivative(p, x)?;
    let ginv = dense_inverse_metric(p, x)?;
    let f = |a: usize, b: usize, c: usize| phi[a + n * b + n * n * c];
    let mut total = 0.0;
    for k in 0..n {
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let coef = u[i] * v[j] * w[l] * z[k];
                    if coef == 0.0 {
                        continue;
                    }
                    let mut r = 0.0;
                    for pp in 0..n {
                        for q in 0..n {
                            r += ginv[(pp, q)] * (f(j, k, pp) * f(i, l, q) - f(i, k, pp) * f(j, l, q));
                        }
                    }
                    total += 0.25 * r * coef;
                }
            }
        }
    }
    Ok(total)
}

/// `¼ Σ g^{pq} g^{jl} (φ_jkp φ_ilq − φ_ikp φ_jlq) v_i v_k`.
pub fn ricci_index_sum(p: &Polytope, x: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    let n = p.n();
    let phi = third_derivative(p, x)?;
    let ginv = dense_inverse_metric(p, x)?;
    let f = |a: usize, b: usize, c: usize| phi[a + n * b + n * n * c];
    let mut total = 0.0;
    for i in 0..n {
        for k in 0..n {
            let vv = v[i] * v[k];
            if vv == 0.0 {
                continue;
            }
            for j in 0..n {
                for l in 0..n {
                    for pp in 0..n {
                        for q in 0..n {
                            total += 0.25
                                * ginv[(pp, q)]
                                * ginv[(j, l)]
                                * (f(j, k, pp) * f(i, l, q) - f(i, k, pp) * f(j, l, q))
                                * vv;
                        }
                    }
                }
            }
        }
    }
    Ok(total)
}

/// Hilbert distance with the chord endpoints located by bisection on the
/// membership test instead of slack ratios.
pub fn hilbert_distance_bisection(p: &Polytope, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    let d = y - x;
    if d.norm() == 0.0 {
        return Ok(0.0);
    }
    let hit = |dir: f64| -> Result<f64> {
        // Largest t with x + dir·t·d inside, for t ≥ 0.
        let mut hi = 1.0;
        while p.contains(&(x + &d * (dir * hi))) {
            hi *= 2.0;
            if hi > 1e15 {
                return Err(Error::Unbounded);
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if p.contains(&(x + &d * (dir * mid))) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    };
    let tq = hit(1.0)?;
    let tp = hit(-1.0)?;
    let len = d.norm();
    let (xy, pq, px, yq) = (len, (tp + tq) * len, tp * len, (tq - 1.0) * len);
    Ok((1.0 + xy * pq / (px * yq)).ln())
}
