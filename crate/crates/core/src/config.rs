//! Tunable constants, gathered in one place.
//!
//! Every tolerance used by the numerical routines lives in one of these
//! records; formulas never hard-code their own thresholds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances for polytope-level computations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// A point is rejected when its smallest slack is below
    /// `boundary_guard * max(‖b‖_∞, 1)`.
    pub boundary_guard: f64,
    /// Newton decrement at which the analytic-center iteration stops.
    pub center_tol: f64,
    /// Iteration cap for the analytic-center iteration.
    pub center_max_iters: usize,
    /// Relative singular-value cutoff for the rank check at load time.
    pub rank_tol: f64,
    /// Allowed departure from g-orthonormality of a frame.
    pub frame_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            boundary_guard: 1e-12,
            center_tol: 1e-8,
            center_max_iters: 200,
            rank_tol: 1e-12,
            frame_tol: 1e-6,
        }
    }
}

/// Norm used to measure node-value changes in the collocation iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    L2,
    #[default]
    L4,
    Inf,
}

impl NormKind {
    pub fn norm(self, v: &[f64]) -> f64 {
        match self {
            NormKind::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            NormKind::L4 => v.iter().map(|x| x.powi(4)).sum::<f64>().powf(0.25),
            NormKind::Inf => v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs())),
        }
    }
}

impl std::str::FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2" | "l2" => Ok(NormKind::L2),
            "4" | "l4" => Ok(NormKind::L4),
            "inf" | "linf" => Ok(NormKind::Inf),
            other => Err(Error::InvalidInput(format!("unknown norm '{other}'"))),
        }
    }
}

/// Default polynomial degree for a target tolerance.
pub fn default_degree(tolerance: f64) -> usize {
    let bits = (1.0 / tolerance).log2().max(0.0);
    ((bits / 2.0).ceil() as usize).max(8)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollocationConfig {
    /// Number of collocation nodes `d`.
    pub degree: usize,
    /// Interval length `ℓ` for a single collocation solve.
    pub interval: f64,
    /// Hard cap on fixed-point iterations.
    pub max_iters: usize,
    /// Target accuracy `ε` for node values.
    pub tolerance: f64,
    pub norm: NormKind,
    /// Consecutive increases of the node change that signal non-contraction.
    pub residual_checks: usize,
    /// How many times an interval may be halved after a failed solve.
    pub max_halvings: usize,
}

impl CollocationConfig {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self {
            degree: default_degree(tolerance),
            tolerance,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree < 1 {
            return Err(Error::InvalidInput("collocation degree must be >= 1".into()));
        }
        if !(self.interval > 0.0 && self.interval.is_finite()) {
            return Err(Error::InvalidInput("collocation interval must be positive".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidInput("collocation tolerance must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidInput("max_iters must be positive".into()));
        }
        Ok(())
    }
}

impl Default for CollocationConfig {
    fn default() -> Self {
        let tolerance = 1e-11;
        Self {
            degree: default_degree(tolerance),
            interval: 1.0,
            max_iters: 200,
            tolerance,
            norm: NormKind::L4,
            residual_checks: 3,
            max_halvings: 20,
        }
    }
}

/// Step size `c / n^{3/4}`.
pub fn default_step_size(n: usize, c: f64) -> f64 {
    c / (n as f64).powf(0.75)
}

pub const DEFAULT_STEP_CONSTANT: f64 = 0.1;

/// Threshold on the auxiliary function `V(γ)`; diagnostic only.
pub const V0: f64 = 48.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub step_size: f64,
    pub collocation: CollocationConfig,
    pub seed: u64,
    /// Interval halvings allowed when a geodesic solve fails to contract.
    pub max_retries: usize,
    pub record_diagnostics: bool,
    /// Defaults to `10 * ceil(1/h)` when unset.
    pub burn_in: Option<usize>,
    pub thin: usize,
    pub tolerances: Tolerances,
    /// Record per-step wall time. Disable for byte-reproducible stats.
    pub record_timing: bool,
}

impl WalkConfig {
    pub fn for_dimension(n: usize) -> Self {
        Self::with_step_size(default_step_size(n, DEFAULT_STEP_CONSTANT))
    }

    pub fn with_step_size(h: f64) -> Self {
        Self {
            step_size: h,
            collocation: CollocationConfig::default(),
            seed: 0,
            max_retries: 12,
            record_diagnostics: false,
            burn_in: None,
            thin: 1,
            tolerances: Tolerances::default(),
            record_timing: true,
        }
    }

    pub fn burn_in_steps(&self) -> usize {
        self.burn_in
            .unwrap_or_else(|| 10 * (1.0 / self.step_size).ceil() as usize)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::InvalidInput("step size h must be positive".into()));
        }
        if self.thin == 0 {
            return Err(Error::InvalidInput("thin must be >= 1".into()));
        }
        self.collocation.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms() {
        let v = [3.0, -4.0];
        assert_eq!(NormKind::L2.norm(&v), 5.0);
        assert_eq!(NormKind::Inf.norm(&v), 4.0);
        assert!((NormKind::L4.norm(&v) - (81.0f64 + 256.0).powf(0.25)).abs() < 1e-14);
    }

    #[test]
    fn degree_grows_with_accuracy() {
        assert_eq!(default_degree(1e-2), 8);
        assert!(default_degree(1e-12) > default_degree(1e-6));
    }

    #[test]
    fn burn_in_default() {
        let cfg = WalkConfig::with_step_size(0.01);
        assert_eq!(cfg.burn_in_steps(), 1000);
    }
}
