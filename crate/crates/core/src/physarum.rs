//! Physarum dynamics `dx/dt = WAᵀ(AWAᵀ)⁻¹b − x`, `W = diag(x/c)`, for the
//! LP `min cᵀx` over `{Ax = b, x ≥ 0}`.
//!
//! The solver integrates `y = ln x`, which obeys
//! `dy/dt = C⁻¹Aᵀ(AWAᵀ)⁻¹b − 1` and keeps `x` positive by construction.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::collocation::{collocation_multistep, MultistepSolution};
use crate::config::CollocationConfig;
use crate::error::{Error, Result};

/// Allowed `‖Ax₀ − b‖_∞`.
const FEASIBILITY_TOL: f64 = 1e-10;
/// Objective increases below this are treated as round-off.
const MONOTONE_TOL: f64 = 1e-9;

/// Default collocation accuracy `ε`.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// Default number of trajectory checkpoints after `t = 0`.
pub const DEFAULT_CHECKPOINTS: usize = 100;

/// Serialised problem `{"A": [[..]], "b": [..], "c": [..], "x0": [..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysarumDoc {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub x0: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysarumProblem {
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: DVector<f64>,
    x0: DVector<f64>,
}

impl PhysarumProblem {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c: DVector<f64>, x0: DVector<f64>) -> Result<Self> {
        let (m, n) = a.shape();
        if m == 0 || n == 0 {
            return Err(Error::InvalidInput("constraint matrix is empty".into()));
        }
        for (what, len) in [("b", b.len()), ("c", c.len()), ("x0", x0.len())] {
            let expected = if what == "b" { m } else { n };
            if len != expected {
                return Err(Error::DimensionMismatch {
                    what,
                    expected,
                    found: len,
                });
            }
        }
        if a.iter().chain(b.iter()).chain(c.iter()).chain(x0.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("problem data"));
        }
        if c.iter().any(|&v| v <= 0.0) {
            return Err(Error::InvalidInput("costs must be strictly positive".into()));
        }
        if x0.iter().any(|&v| v <= 0.0) {
            return Err(Error::InvalidInput("x0 must be strictly positive".into()));
        }
        let rank = a.rank(1e-10 * a.amax().max(1.0));
        if rank < m {
            return Err(Error::InvalidInput(format!(
                "equality matrix has rank {rank}, expected full row rank {m}"
            )));
        }
        let residual = (&a * &x0 - &b).amax();
        if residual > FEASIBILITY_TOL {
            return Err(Error::InvalidInput(format!(
                "x0 violates Ax = b by {residual:e}"
            )));
        }
        Ok(Self { a, b, c, x0 })
    }

    pub fn from_doc(doc: &PhysarumDoc) -> Result<Self> {
        let m = doc.a.len();
        let n = doc.a.first().map_or(0, Vec::len);
        if doc.a.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("rows of A have different lengths".into()));
        }
        let a = DMatrix::from_fn(m, n, |i, j| doc.a[i][j]);
        Self::new(
            a,
            DVector::from_column_slice(&doc.b),
            DVector::from_column_slice(&doc.c),
            DVector::from_column_slice(&doc.x0),
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_doc(&serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_doc(&self) -> PhysarumDoc {
        PhysarumDoc {
            a: self.a.row_iter().map(|r| r.iter().copied().collect()).collect(),
            b: self.b.iter().copied().collect(),
            c: self.c.iter().copied().collect(),
            x0: self.x0.iter().copied().collect(),
        }
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    pub fn x0(&self) -> &DVector<f64> {
        &self.x0
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        self.c.dot(x)
    }

    /// `‖Ax − b‖_∞`.
    pub fn infeasibility(&self, x: &DVector<f64>) -> f64 {
        (&self.a * x - &self.b).amax()
    }

    /// `(AWAᵀ)⁻¹b` with `W = diag(x/c)`.
    fn potentials(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let w = x.component_div(&self.c);
        let mut aw = self.a.clone();
        for (j, mut col) in aw.column_iter_mut().enumerate() {
            col *= w[j];
        }
        let l = (&aw * self.a.transpose()).cholesky().ok_or(Error::Singular)?;
        Ok(l.solve(&self.b))
    }
}

/// `WAᵀ(AWAᵀ)⁻¹b − x`.
pub fn physarum_rhs(x: &DVector<f64>, prob: &PhysarumProblem) -> Result<DVector<f64>> {
    if x.len() != prob.n() {
        return Err(Error::DimensionMismatch {
            what: "x",
            expected: prob.n(),
            found: x.len(),
        });
    }
    if x.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidInput("physarum state must be positive".into()));
    }
    let lambda = prob.potentials(x)?;
    let flow = (prob.a.transpose() * lambda).component_mul(x).component_div(&prob.c);
    Ok(flow - x)
}

/// `C⁻¹Aᵀ(AWAᵀ)⁻¹b − 1` at `x = exp(y)`.
pub fn physarum_log_rhs(y: &DVector<f64>, prob: &PhysarumProblem) -> Result<DVector<f64>> {
    let x = y.map(f64::exp);
    let lambda = prob.potentials(&x)?;
    Ok((prob.a.transpose() * lambda).component_div(&prob.c).add_scalar(-1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub t: f64,
    pub x: Vec<f64>,
    pub objective: f64,
    pub infeasibility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysarumSolution {
    pub t_final: f64,
    pub x: Vec<f64>,
    pub objective: f64,
    pub trajectory: Vec<Checkpoint>,
    pub max_infeasibility: f64,
    /// Checkpoint times at which `cᵀx` rose by more than round-off.
    pub objective_increases: Vec<f64>,
    /// Components that underflowed to zero, i.e. left the optimal face.
    pub vanished: Vec<usize>,
    pub halvings: usize,
    pub collocation_steps: usize,
}

impl PhysarumSolution {
    /// CSV with columns `t, x0..x{n-1}, objective, infeasibility`.
    pub fn trajectory_csv(&self) -> String {
        let n = self.x.len();
        let mut out = String::from("t");
        for i in 0..n {
            out.push_str(&format!(",x{i}"));
        }
        out.push_str(",objective,infeasibility\n");
        for c in &self.trajectory {
            out.push_str(&c.t.to_string());
            for v in &c.x {
                out.push_str(&format!(",{v}"));
            }
            out.push_str(&format!(",{},{}\n", c.objective, c.infeasibility));
        }
        out
    }
}

/// Integrate to time `t_final` in log coordinates with collocation
/// tolerance `eps`, recording 101 evenly spaced checkpoints.
pub fn physarum_solve(prob: &PhysarumProblem, t_final: f64, eps: f64) -> Result<PhysarumSolution> {
    physarum_solve_with(prob, t_final, &CollocationConfig::with_tolerance(eps), DEFAULT_CHECKPOINTS)
}

pub fn physarum_solve_with(
    prob: &PhysarumProblem,
    t_final: f64,
    cfg: &CollocationConfig,
    checkpoints: usize,
) -> Result<PhysarumSolution> {
    let y0 = prob.x0.map(f64::ln);
    let n = prob.n();
    let sol = solve_field(
        |y| physarum_log_rhs(y, prob).unwrap_or_else(|_| DVector::from_element(n, f64::NAN)),
        &y0,
        t_final,
        cfg,
    )?;
    summarise(prob, t_final, &sol, checkpoints, |y| y.map(f64::exp))
}

/// Integrate `x` directly. Only intended for cross-checking the log
/// formulation.
pub fn physarum_solve_raw(
    prob: &PhysarumProblem,
    t_final: f64,
    cfg: &CollocationConfig,
    checkpoints: usize,
) -> Result<PhysarumSolution> {
    let n = prob.n();
    let sol = solve_field(
        |x| physarum_rhs(x, prob).unwrap_or_else(|_| DVector::from_element(n, f64::NAN)),
        &prob.x0,
        t_final,
        cfg,
    )?;
    summarise(prob, t_final, &sol, checkpoints, |x| x.clone())
}

fn solve_field<F: Fn(&DVector<f64>) -> DVector<f64>>(
    f: F,
    v: &DVector<f64>,
    t_final: f64,
    cfg: &CollocationConfig,
) -> Result<MultistepSolution> {
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidInput("final time must be finite and non-negative".into()));
    }
    collocation_multistep(|y, _| f(y), v, t_final, cfg, None)
}

fn summarise<M: Fn(&DVector<f64>) -> DVector<f64>>(
    prob: &PhysarumProblem,
    t_final: f64,
    sol: &MultistepSolution,
    checkpoints: usize,
    to_x: M,
) -> Result<PhysarumSolution> {
    let count = checkpoints.max(1);
    let mut trajectory = Vec::with_capacity(count + 1);
    for k in 0..=count {
        let t = if k == count { t_final } else { t_final * k as f64 / count as f64 };
        let state = if sol.curve.is_empty() { sol.end.clone() } else { sol.curve.eval(t)? };
        let x = to_x(&state);
        trajectory.push(Checkpoint {
            t,
            objective: prob.objective(&x),
            infeasibility: prob.infeasibility(&x),
            x: x.iter().copied().collect(),
        });
    }
    let x_final = to_x(&sol.end);
    let max_infeasibility = trajectory
        .iter()
        .map(|c| c.infeasibility)
        .fold(prob.infeasibility(&x_final), f64::max);
    let objective_increases = trajectory
        .windows(2)
        .filter(|w| w[1].objective > w[0].objective + MONOTONE_TOL)
        .map(|w| w[1].t)
        .collect();
    Ok(PhysarumSolution {
        t_final,
        objective: prob.objective(&x_final),
        vanished: (0..x_final.len()).filter(|&i| x_final[i] == 0.0).collect(),
        x: x_final.iter().copied().collect(),
        trajectory,
        max_infeasibility,
        objective_increases,
        halvings: sol.halvings,
        collocation_steps: sol.reports.len(),
    })
}
