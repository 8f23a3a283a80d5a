use std::time::Instant;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::density::transition_log_density;
use super::geodesic::{jacobi_logdet, solve_geodesic, transport_frame, GeodesicPath};
use crate::config::{WalkConfig, V0};
use crate::error::{Error, Result};
use crate::point::ManifoldPoint;
use crate::polytope::Polytope;

/// Seeded generator used for every chain.
pub type WalkRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> WalkRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Why a proposal was discarded before the Metropolis test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailReason {
    /// The geodesic left the polytope.
    Exit,
    /// The Jacobi matrix was singular.
    Singular,
    /// A collocation solve did not converge even after halving.
    NonContraction,
}

impl FailReason {
    pub fn from_error(e: &Error) -> Self {
        match e {
            Error::SingularJacobian => FailReason::Singular,
            e if e.is_domain_exit() => FailReason::Exit,
            _ => FailReason::NonContraction,
        }
    }
}

/// Everything computed for one proposal.
#[derive(Debug, Clone)]
pub struct WalkStep {
    pub from: ManifoldPoint,
    /// Gaussian direction with covariance `g(x)⁻¹`.
    pub w: DVector<f64>,
    /// Unscaled initial velocity `√h·w + (h/2)μ(x)`.
    pub v_x: DVector<f64>,
    /// Solved geodesic, kept only when diagnostics are recorded.
    pub geodesic: Option<GeodesicPath>,
    pub to: Option<ManifoldPoint>,
    /// Unscaled reverse velocity `−ℓ·γ'(ℓ)`.
    pub v_y: Option<DVector<f64>>,
    pub log_fwd: f64,
    pub log_rev: f64,
    pub logdet_dexp_fwd: f64,
    pub logdet_dexp_rev: f64,
    pub v_gamma: f64,
    pub accepted: bool,
    pub failure: Option<FailReason>,
    pub error: Option<Error>,
    /// `max_t ‖R(t)‖_F` over the geodesic nodes.
    pub max_curvature_norm: f64,
    /// Largest frame orthonormality defect seen during transport.
    pub frame_deviation: f64,
}

impl WalkStep {
    /// `log p(y → x) − log p(x → y)`; NaN for failed proposals.
    pub fn log_ratio(&self) -> f64 {
        self.log_rev - self.log_fwd
    }

    fn failed(from: &ManifoldPoint, w: DVector<f64>, v_x: DVector<f64>, e: Error) -> Self {
        WalkStep {
            from: from.clone(),
            w,
            v_x,
            geodesic: None,
            to: None,
            v_y: None,
            log_fwd: f64::NAN,
            log_rev: f64::NAN,
            logdet_dexp_fwd: f64::NAN,
            logdet_dexp_rev: f64::NAN,
            v_gamma: f64::NAN,
            accepted: false,
            failure: Some(FailReason::from_error(&e)),
            error: Some(e),
            max_curvature_norm: f64::NAN,
            frame_deviation: f64::NAN,
        }
    }
}

/// Length of the rescaled geodesic, `ℓ = √(nh)`.
pub fn geodesic_length(n: usize, h: f64) -> f64 {
    (n as f64 * h).sqrt()
}

/// Unscaled velocity `v_x = √h·w + (h/2)μ(x)` for a Gaussian direction.
pub fn unscaled_velocity(x: &ManifoldPoint, w: &DVector<f64>, h: f64) -> DVector<f64> {
    w * h.sqrt() + x.drift() * (0.5 * h)
}

/// Rescaled initial velocity `γ'(0) = v_x / ℓ`; equals
/// `w/√n + ½√(h/n)·μ(x)` for `v_x` from [`unscaled_velocity`].
pub fn rescaled_velocity(v_x: &DVector<f64>, n: usize, h: f64) -> DVector<f64> {
    v_x / geodesic_length(n, h)
}

/// `w = L⁻ᵀz` with `z` standard normal, so `Cov(w) = g(x)⁻¹`.
pub fn sample_gaussian_direction<R: Rng + ?Sized>(x: &ManifoldPoint, rng: &mut R) -> DVector<f64> {
    let z = DVector::from_fn(x.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
    x.inverse_factor_transpose(&z)
}

/// A geodesic from `start` with unscaled initial velocity and step size.
#[derive(Debug, Clone)]
pub struct GeodesicSpec {
    pub start: ManifoldPoint,
    /// Rescaled `γ'(0)`.
    pub velocity: DVector<f64>,
    pub length: f64,
    pub step_size: f64,
}

impl GeodesicSpec {
    pub fn new(start: &ManifoldPoint, v_x: &DVector<f64>, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidInput("step size h must be positive".into()));
        }
        let n = start.dim();
        Ok(Self {
            start: start.clone(),
            velocity: rescaled_velocity(v_x, n, h),
            length: geodesic_length(n, h),
            step_size: h,
        })
    }

    pub fn solve(&self, p: &Polytope, cfg: &WalkConfig) -> Result<GeodesicPath> {
        solve_geodesic(
            p,
            &self.start,
            &self.velocity,
            self.length,
            &cfg.collocation,
            cfg.max_retries,
            &cfg.tolerances,
        )
    }
}

struct Evaluated {
    path: GeodesicPath,
    v_y: DVector<f64>,
    logdet_fwd: f64,
    logdet_rev: f64,
    log_fwd: f64,
    log_rev: f64,
    v_gamma: f64,
    max_curvature_norm: f64,
    frame_deviation: f64,
}

fn evaluate(p: &Polytope, x: &ManifoldPoint, v_x: &DVector<f64>, cfg: &WalkConfig) -> Result<Evaluated> {
    let h = cfg.step_size;
    let n = x.dim();
    let spec = GeodesicSpec::new(x, v_x, h)?;
    let path = spec.solve(p, cfg)?;
    path.check_inside(p)?;
    let v_gamma = path.auxiliary_v(p, h)?;
    let frames = transport_frame(&path, &cfg.collocation, &cfg.tolerances)?;
    let lengths: Vec<f64> = path.segments.iter().map(|s| s.len()).collect();
    let logdet_fwd = jacobi_logdet(&frames.curvature, &lengths, path.len, n, false, &cfg.collocation)?;
    let logdet_rev = jacobi_logdet(&frames.curvature, &lengths, path.len, n, true, &cfg.collocation)?;
    let v_y = -&path.end_velocity * spec.length;
    let y = &path.end;
    let log_fwd = transition_log_density(x, v_x, y, logdet_fwd, h);
    let log_rev = transition_log_density(y, &v_y, x, logdet_rev, h);
    Ok(Evaluated {
        v_y,
        logdet_fwd,
        logdet_rev,
        log_fwd,
        log_rev,
        v_gamma,
        max_curvature_norm: frames.max_curvature_norm,
        frame_deviation: frames.max_deviation,
        path,
    })
}

/// Full proposal for a given unscaled velocity `v_x`; deterministic.
pub fn propose_with_velocity(
    p: &Polytope,
    x: &ManifoldPoint,
    v_x: &DVector<f64>,
    cfg: &WalkConfig,
) -> WalkStep {
    let h = cfg.step_size;
    let w = (v_x - x.drift() * (0.5 * h)) / h.sqrt();
    build_step(p, x, w, v_x.clone(), cfg)
}

/// Full proposal for a given Gaussian direction `w`; deterministic.
pub fn propose_with_direction(
    p: &Polytope,
    x: &ManifoldPoint,
    w: &DVector<f64>,
    cfg: &WalkConfig,
) -> WalkStep {
    let v_x = unscaled_velocity(x, w, cfg.step_size);
    build_step(p, x, w.clone(), v_x, cfg)
}

fn build_step(
    p: &Polytope,
    x: &ManifoldPoint,
    w: DVector<f64>,
    v_x: DVector<f64>,
    cfg: &WalkConfig,
) -> WalkStep {
    match evaluate(p, x, &v_x, cfg) {
        Ok(e) => WalkStep {
            from: x.clone(),
            w,
            v_x,
            to: Some(e.path.end.clone()),
            geodesic: cfg.record_diagnostics.then_some(e.path),
            v_y: Some(e.v_y),
            log_fwd: e.log_fwd,
            log_rev: e.log_rev,
            logdet_dexp_fwd: e.logdet_fwd,
            logdet_dexp_rev: e.logdet_rev,
            v_gamma: e.v_gamma,
            accepted: false,
            failure: None,
            error: None,
            max_curvature_norm: e.max_curvature_norm,
            frame_deviation: e.frame_deviation,
        },
        Err(e) => WalkStep::failed(x, w, v_x, e),
    }
}

/// Draw a direction and build the (unfiltered) proposal.
pub fn propose<R: Rng + ?Sized>(
    p: &Polytope,
    x: &ManifoldPoint,
    cfg: &WalkConfig,
    rng: &mut R,
) -> WalkStep {
    let w = sample_gaussian_direction(x, rng);
    propose_with_direction(p, x, &w, cfg)
}

/// Metropolis filter on a built proposal: accept when
/// `log u < log p(y→x) − log p(x→y)`. Failed proposals are rejected.
pub fn filter<R: Rng + ?Sized>(x: &ManifoldPoint, mut step: WalkStep, rng: &mut R) -> (ManifoldPoint, WalkStep) {
    let u: f64 = rng.random();
    if step.failure.is_none() && u.ln() < step.log_ratio() {
        step.accepted = true;
        let y = step.to.clone().expect("successful proposal has an endpoint");
        (y, step)
    } else {
        (x.clone(), step)
    }
}

/// One step of the geodesic walk.
pub fn metropolis_step<R: Rng + ?Sized>(
    p: &Polytope,
    x: &ManifoldPoint,
    cfg: &WalkConfig,
    rng: &mut R,
) -> (ManifoldPoint, WalkStep) {
    let step = propose(p, x, cfg, rng);
    filter(x, step, rng)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailCounts {
    pub exit: usize,
    pub singular: usize,
    pub non_contraction: usize,
}

impl FailCounts {
    pub fn record(&mut self, r: FailReason) {
        match r {
            FailReason::Exit => self.exit += 1,
            FailReason::Singular => self.singular += 1,
            FailReason::NonContraction => self.non_contraction += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.exit + self.singular + self.non_contraction
    }
}

/// Empirical quantiles of a sample; all zero for an empty sample.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub p05: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub p95: f64,
    pub max: f64,
}

impl Quantiles {
    pub fn from_values(values: &[f64]) -> Self {
        let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
        if v.is_empty() {
            return Self::default();
        }
        v.sort_by(|a, b| a.total_cmp(b));
        let q = |f: f64| quantile_sorted(&v, f);
        Self {
            p05: q(0.05),
            p25: q(0.25),
            p50: q(0.5),
            p75: q(0.75),
            p95: q(0.95),
            max: v[v.len() - 1],
        }
    }
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile_sorted(v: &[f64], f: f64) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let pos = f * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

/// Counts of `V(γ)` values in fixed bins.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// Bin edges; the last bin is open-ended.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    fn v_gamma() -> Self {
        let edges = vec![0.0, 4.0, 8.0, 12.0, 16.0, 20.0, 24.0, 32.0, 40.0, V0];
        let counts = vec![0; edges.len()];
        Self { edges, counts }
    }

    fn add(&mut self, x: f64) {
        if let Some(k) = self.edges.iter().rposition(|&e| x >= e) {
            self.counts[k] += 1;
        }
    }
}

/// Summary of a chain run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStats {
    pub steps: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub samples: usize,
    pub accept_rate: f64,
    pub fail_counts: FailCounts,
    pub v_gamma_quantiles: Quantiles,
    pub v_gamma_histogram: Histogram,
    /// Proposals with `V(γ) > V0`.
    pub v_gamma_above_v0: usize,
    pub log_ratio_quantiles: Quantiles,
    /// `None` when timing is disabled for reproducible output.
    pub wall_time_s: Option<f64>,
    pub step_time_s: Option<f64>,
    /// Set when no post-burn-in proposal was accepted.
    pub zero_acceptance: bool,
    pub seed: u64,
    pub h: f64,
}

impl ChainStats {
    fn empty(cfg: &WalkConfig) -> Self {
        Self {
            steps: 0,
            burn_in: 0,
            thin: cfg.thin,
            samples: 0,
            accept_rate: 0.0,
            fail_counts: FailCounts::default(),
            v_gamma_quantiles: Quantiles::default(),
            v_gamma_histogram: Histogram::v_gamma(),
            v_gamma_above_v0: 0,
            log_ratio_quantiles: Quantiles::default(),
            wall_time_s: cfg.record_timing.then_some(0.0),
            step_time_s: cfg.record_timing.then_some(0.0),
            zero_acceptance: false,
            seed: cfg.seed,
            h: cfg.step_size,
        }
    }
}

/// Samples and statistics of one chain.
#[derive(Debug, Clone)]
pub struct Chain {
    pub samples: Vec<DVector<f64>>,
    pub stats: ChainStats,
    /// Post-burn-in proposals, kept when `record_diagnostics` is set.
    pub steps: Vec<WalkStep>,
}

/// Run `steps` post-burn-in iterations from `start` with the generator
/// seeded from `cfg.seed`, keeping every `cfg.thin`-th state.
pub fn run_chain(p: &Polytope, start: &DVector<f64>, steps: usize, cfg: &WalkConfig) -> Result<Chain> {
    let mut rng = seeded_rng(cfg.seed);
    run_chain_with_rng(p, start, steps, cfg, &mut rng)
}

pub fn run_chain_with_rng<R: Rng + ?Sized>(
    p: &Polytope,
    start: &DVector<f64>,
    steps: usize,
    cfg: &WalkConfig,
    rng: &mut R,
) -> Result<Chain> {
    cfg.validate()?;
    let mut x = ManifoldPoint::with_tolerances(p, start.clone(), &cfg.tolerances)?;
    let mut stats = ChainStats::empty(cfg);
    if steps == 0 {
        return Ok(Chain {
            samples: Vec::new(),
            stats,
            steps: Vec::new(),
        });
    }
    let clock = Instant::now();
    let burn_in = cfg.burn_in_steps();
    for _ in 0..burn_in {
        x = metropolis_step(p, &x, cfg, rng).0;
    }
    let mut samples = Vec::with_capacity(steps / cfg.thin);
    let mut records = Vec::new();
    let mut v_values = Vec::with_capacity(steps);
    let mut ratios = Vec::with_capacity(steps);
    let mut accepted = 0usize;
    let post_clock = Instant::now();
    for k in 0..steps {
        let (next, step) = metropolis_step(p, &x, cfg, rng);
        x = next;
        if step.accepted {
            accepted += 1;
        }
        match step.failure {
            Some(r) => stats.fail_counts.record(r),
            None => {
                v_values.push(step.v_gamma);
                stats.v_gamma_histogram.add(step.v_gamma);
                if step.v_gamma > V0 {
                    stats.v_gamma_above_v0 += 1;
                }
                ratios.push(step.log_ratio());
            }
        }
        if (k + 1) % cfg.thin == 0 {
            samples.push(x.x().clone());
        }
        if cfg.record_diagnostics {
            records.push(step);
        }
    }
    stats.steps = steps;
    stats.burn_in = burn_in;
    stats.samples = samples.len();
    stats.accept_rate = accepted as f64 / steps as f64;
    stats.zero_acceptance = accepted == 0;
    stats.v_gamma_quantiles = Quantiles::from_values(&v_values);
    stats.log_ratio_quantiles = Quantiles::from_values(&ratios);
    if cfg.record_timing {
        stats.wall_time_s = Some(clock.elapsed().as_secs_f64());
        stats.step_time_s = Some(post_clock.elapsed().as_secs_f64() / steps as f64);
    }
    Ok(Chain {
        samples,
        stats,
        steps: records,
    })
}
