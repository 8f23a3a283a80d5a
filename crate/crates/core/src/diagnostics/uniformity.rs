//! Statistical checks that a sample looks uniform on a polytope.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::center::bounding_box;
use crate::error::{Error, Result};
use crate::polytope::Polytope;
use crate::walk::seeded_rng;

/// Minimum sample count accepted by [`uniformity_report`].
pub const MIN_SAMPLES: usize = 1000;
/// Number of random projections tested.
pub const PROJECTIONS: usize = 8;
/// Projections must reach this p-value to count as passing.
pub const KS_ALPHA: f64 = 0.01;
/// Proposal budget for the rejection-sampling reference.
const MAX_REJECTION_DRAWS: usize = 50_000_000;

/// Integrated autocorrelation time `τ = 1 + 2Σρ_k`, summed up to the
/// first lag `M ≥ 5τ(M)`. Constant series give `τ = 1`.
pub fn integrated_autocorrelation_time(series: &[f64]) -> f64 {
    let n = series.len();
    if n < 2 {
        return 1.0;
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let c: Vec<f64> = series.iter().map(|x| x - mean).collect();
    let var = c.iter().map(|x| x * x).sum::<f64>() / n as f64;
    let scale = series.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if !(var > (1e-12 * scale).powi(2)) {
        return 1.0;
    }
    let mut tau = 1.0;
    for k in 1..n / 2 {
        let acf = c[..n - k].iter().zip(&c[k..]).map(|(a, b)| a * b).sum::<f64>() / (n as f64 * var);
        tau += 2.0 * acf;
        if k as f64 >= 5.0 * tau {
            break;
        }
    }
    tau.max(1.0 / n as f64)
}

/// Effective sample size `n / τ`, capped at `n`.
pub fn effective_sample_size(series: &[f64]) -> f64 {
    let n = series.len() as f64;
    (n / integrated_autocorrelation_time(series)).min(n)
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_a − F_b|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(|p, q| p.total_cmp(q));
    y.sort_by(|p, q| p.total_cmp(q));
    let (na, nb) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0_f64;
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic p-value `Q_KS((√n_e + 0.12 + 0.11/√n_e)·D)`.
pub fn ks_p_value(d: f64, n_eff: f64) -> f64 {
    let sn = n_eff.sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Uniform points from the polytope by rejection from its bounding box.
pub fn rejection_samples<R: Rng + ?Sized>(p: &Polytope, count: usize, rng: &mut R) -> Result<Vec<DVector<f64>>> {
    let (lo, hi) = bounding_box(p)?;
    let n = p.n();
    let mut out = Vec::with_capacity(count);
    let mut draws = 0usize;
    while out.len() < count {
        let x = DVector::from_fn(n, |i, _| lo[i] + (hi[i] - lo[i]) * rng.random::<f64>());
        draws += 1;
        if p.contains(&x) {
            out.push(x);
        } else if draws > MAX_REJECTION_DRAWS {
            return Err(Error::InvalidInput(
                "rejection reference is too inefficient for this polytope".into(),
            ));
        }
    }
    Ok(out)
}

/// Closed-form first two moments when the polytope is a box or the
/// standard simplex.
pub fn exact_moments(p: &Polytope) -> Option<(Vec<f64>, Vec<f64>)> {
    if let Some((lo, hi)) = p.as_box() {
        let mean = lo.iter().zip(&hi).map(|(l, h)| 0.5 * (l + h)).collect();
        let var = lo.iter().zip(&hi).map(|(l, h)| (h - l).powi(2) / 12.0).collect();
        return Some((mean, var));
    }
    if p.is_standard_simplex() {
        // Marginals of the uniform simplex are Beta(1, n).
        let n = p.n() as f64;
        let mean = 1.0 / (n + 1.0);
        let var = n / ((n + 1.0).powi(2) * (n + 2.0));
        return Some((vec![mean; p.n()], vec![var; p.n()]));
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinateSummary {
    pub mean: f64,
    pub variance: f64,
    pub ess: f64,
    /// Standard error of the mean from the effective sample size.
    pub mean_se: f64,
    pub expected_mean: Option<f64>,
    pub expected_variance: Option<f64>,
    /// `(mean − expected) / mean_se`.
    pub mean_z: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionTest {
    pub direction: Vec<f64>,
    pub statistic: f64,
    pub effective_n: f64,
    pub p_value: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub samples: usize,
    pub reference_samples: usize,
    pub coordinates: Vec<CoordinateSummary>,
    pub projections: Vec<ProjectionTest>,
    pub projections_passed: usize,
    /// Every coordinate mean within three standard errors, when closed
    /// forms are known.
    pub moments_ok: Option<bool>,
    /// At least `PROJECTIONS − 1` projections pass.
    pub passed: bool,
}

/// Moments, effective sample sizes and projected KS tests against a
/// rejection-sampling reference of `max(samples, 20000)` points.
pub fn uniformity_report(samples: &[DVector<f64>], p: &Polytope, seed: u64) -> Result<UniformityReport> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_SAMPLES,
            got: samples.len(),
        });
    }
    let n = p.n();
    for s in samples {
        p.check_dim(s, "sample")?;
    }
    let count = samples.len() as f64;
    let exact = exact_moments(p);
    let mut coordinates = Vec::with_capacity(n);
    for i in 0..n {
        let series: Vec<f64> = samples.iter().map(|s| s[i]).collect();
        let mean = series.iter().sum::<f64>() / count;
        let variance = series.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1.0);
        let ess = effective_sample_size(&series);
        let mean_se = (variance / ess).sqrt();
        let (expected_mean, expected_variance) = match &exact {
            Some((m, v)) => (Some(m[i]), Some(v[i])),
            None => (None, None),
        };
        let mean_z = expected_mean.map(|m| {
            if mean_se > 0.0 {
                (mean - m) / mean_se
            } else if mean == m {
                0.0
            } else {
                f64::INFINITY
            }
        });
        coordinates.push(CoordinateSummary {
            mean,
            variance,
            ess,
            mean_se,
            expected_mean,
            expected_variance,
            mean_z,
        });
    }

    let mut rng = seeded_rng(seed);
    let reference = rejection_samples(p, samples.len().max(20_000), &mut rng)?;
    let mut projections = Vec::with_capacity(PROJECTIONS);
    for _ in 0..PROJECTIONS {
        let mut u = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        u /= u.norm();
        let a: Vec<f64> = samples.iter().map(|s| s.dot(&u)).collect();
        let b: Vec<f64> = reference.iter().map(|s| s.dot(&u)).collect();
        let d = ks_statistic(&a, &b);
        let ess = effective_sample_size(&a);
        let nr = b.len() as f64;
        let n_eff = ess * nr / (ess + nr);
        let p_value = ks_p_value(d, n_eff);
        projections.push(ProjectionTest {
            direction: u.iter().copied().collect(),
            statistic: d,
            effective_n: n_eff,
            p_value,
            passed: p_value > KS_ALPHA,
        });
    }
    let projections_passed = projections.iter().filter(|t| t.passed).count();
    let moments_ok = exact.as_ref().map(|_| {
        coordinates
            .iter()
            .all(|c| c.mean_z.is_some_and(|z| z.abs() <= 3.0))
    });
    Ok(UniformityReport {
        samples: samples.len(),
        reference_samples: reference.len(),
        coordinates,
        projections,
        projections_passed,
        moments_ok,
        passed: projections_passed + 1 >= PROJECTIONS,
    })
}
