//! Python bindings. Vectors are lists of floats, matrices are lists of
//! rows, and reports come back as plain dicts.

use hessian_walk::diagnostics::{compare_walks_with, uniformity_report as core_uniformity_report};
use hessian_walk::geometry::ricci as core_ricci;
use hessian_walk::physarum::{physarum_solve as core_physarum_solve, PhysarumProblem, DEFAULT_TOLERANCE};
use hessian_walk::walk::{propose_with_velocity, run_chain};
use hessian_walk::{analytic_center, make_point, CollocationConfig, DMatrix, DVector, Error, WalkConfig};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::Serialize;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidInput(_)
        | Error::DimensionMismatch { .. }
        | Error::Parse(_)
        | Error::RankDeficient { .. }
        | Error::NotInterior { .. }
        | Error::TooFewSamples { .. }
        | Error::Unbounded => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn vector(v: Vec<f64>) -> DVector<f64> {
    DVector::from_vec(v)
}

fn matrix(rows: &[Vec<f64>]) -> PyResult<DMatrix<f64>> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix rows have different lengths"));
    }
    Ok(DMatrix::from_fn(m, n, |i, j| rows[i][j]))
}

fn list(v: &DVector<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Serialise to JSON and hand the text to Python's `json.loads`.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    PyModule::import(py, "json")?.call_method1("loads", (text,))
}

/// Open polytope `{x : Ax > b}`.
#[pyclass(name = "Polytope", module = "hessian_walk_py", frozen)]
struct PyPolytope {
    inner: hessian_walk::Polytope,
}

#[pymethods]
impl PyPolytope {
    #[new]
    fn new(a: Vec<Vec<f64>>, b: Vec<f64>) -> PyResult<Self> {
        let inner = hessian_walk::Polytope::new(matrix(&a)?, vector(b)).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    /// `[-1, 1]^n`.
    #[staticmethod]
    fn hypercube(n: usize) -> PyResult<Self> {
        hessian_walk::Polytope::hypercube(n).map(|inner| Self { inner }).map_err(to_py_err)
    }

    /// `{x > 0, Σx < 1}` in dimension `n`.
    #[staticmethod]
    fn standard_simplex(n: usize) -> PyResult<Self> {
        hessian_walk::Polytope::standard_simplex(n).map(|inner| Self { inner }).map_err(to_py_err)
    }

    #[staticmethod]
    fn from_box(lo: Vec<f64>, hi: Vec<f64>) -> PyResult<Self> {
        hessian_walk::Polytope::from_box(&lo, &hi).map(|inner| Self { inner }).map_err(to_py_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        hessian_walk::Polytope::from_json(text).map(|inner| Self { inner }).map_err(to_py_err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        hessian_walk::Polytope::load(path).map(|inner| Self { inner }).map_err(to_py_err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner.to_doc()).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn a(&self) -> Vec<Vec<f64>> {
        rows(self.inner.a())
    }

    #[getter]
    fn b(&self) -> Vec<f64> {
        list(self.inner.b())
    }

    fn contains(&self, x: Vec<f64>) -> bool {
        x.len() == self.inner.n() && self.inner.contains(&vector(x))
    }

    /// Minimiser of the log barrier.
    fn analytic_center(&self) -> PyResult<Vec<f64>> {
        let c = analytic_center(&self.inner, None, &Default::default()).map_err(to_py_err)?;
        Ok(list(c.x()))
    }

    /// Metric `g(x) = A_xᵀA_x` as a list of rows.
    fn metric(&self, x: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        Ok(rows(&make_point(&self.inner, vector(x)).map_err(to_py_err)?.metric()))
    }

    fn leverage(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(list(make_point(&self.inner, vector(x)).map_err(to_py_err)?.leverage()))
    }

    fn drift(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(list(make_point(&self.inner, vector(x)).map_err(to_py_err)?.drift()))
    }

    fn log_det_metric(&self, x: Vec<f64>) -> PyResult<f64> {
        Ok(make_point(&self.inner, vector(x)).map_err(to_py_err)?.log_det_metric())
    }

    /// `Ric(v)` at `x`.
    fn ricci(&self, x: Vec<f64>, v: Vec<f64>) -> PyResult<f64> {
        let p = make_point(&self.inner, vector(x)).map_err(to_py_err)?;
        if v.len() != self.inner.n() {
            return Err(PyValueError::new_err("v has the wrong dimension"));
        }
        Ok(core_ricci(&p, &vector(v)))
    }

    fn __repr__(&self) -> String {
        format!("Polytope(n={}, m={})", self.inner.n(), self.inner.m())
    }
}

/// Run the geodesic walk. Returns `(samples, stats)`.
#[pyfunction]
#[pyo3(signature = (polytope, steps, h=None, seed=0, burn_in=None, thin=1, start=None, record_timing=false))]
#[allow(clippy::too_many_arguments)]
fn sample<'py>(
    py: Python<'py>,
    polytope: &PyPolytope,
    steps: usize,
    h: Option<f64>,
    seed: u64,
    burn_in: Option<usize>,
    thin: usize,
    start: Option<Vec<f64>>,
    record_timing: bool,
) -> PyResult<(Vec<Vec<f64>>, Bound<'py, PyAny>)> {
    let p = &polytope.inner;
    let mut cfg = match h {
        Some(h) => WalkConfig::with_step_size(h),
        None => WalkConfig::for_dimension(p.n()),
    };
    cfg.seed = seed;
    cfg.burn_in = burn_in;
    cfg.thin = thin;
    cfg.record_timing = record_timing;
    let start = match start {
        Some(x) => vector(x),
        None => analytic_center(p, None, &cfg.tolerances).map_err(to_py_err)?.x().clone(),
    };
    let chain = py.detach(|| run_chain(p, &start, steps, &cfg)).map_err(to_py_err)?;
    let samples = chain.samples.iter().map(list).collect();
    Ok((samples, to_py(py, &chain.stats)?))
}

#[derive(Serialize)]
struct StepReport {
    endpoint: Option<Vec<f64>>,
    reverse_velocity: Option<Vec<f64>>,
    logdet_dexp_fwd: f64,
    logdet_dexp_rev: f64,
    v_gamma: f64,
    log_density_fwd: f64,
    log_density_rev: f64,
    log_ratio: f64,
    failure: Option<String>,
}

/// One proposal from `x` with unscaled initial velocity `v`.
#[pyfunction]
fn geodesic_step<'py>(py: Python<'py>, polytope: &PyPolytope, x: Vec<f64>, v: Vec<f64>, h: f64) -> PyResult<Bound<'py, PyAny>> {
    let p = &polytope.inner;
    if v.len() != p.n() {
        return Err(PyValueError::new_err("v has the wrong dimension"));
    }
    let cfg = WalkConfig::with_step_size(h);
    cfg.validate().map_err(to_py_err)?;
    let point = make_point(p, vector(x)).map_err(to_py_err)?;
    let s = propose_with_velocity(p, &point, &vector(v), &cfg);
    let report = StepReport {
        endpoint: s.to.as_ref().map(|y| list(y.x())),
        reverse_velocity: s.v_y.as_ref().map(list),
        logdet_dexp_fwd: s.logdet_dexp_fwd,
        logdet_dexp_rev: s.logdet_dexp_rev,
        v_gamma: s.v_gamma,
        log_density_fwd: s.log_fwd,
        log_density_rev: s.log_rev,
        log_ratio: s.log_ratio(),
        failure: s.error.as_ref().map(|e| e.to_string()),
    };
    to_py(py, &report)
}

/// Uniformity diagnostics of a sample against the polytope.
#[pyfunction]
#[pyo3(signature = (polytope, samples, seed=0))]
fn uniformity_report<'py>(py: Python<'py>, polytope: &PyPolytope, samples: Vec<Vec<f64>>, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let xs: Vec<DVector<f64>> = samples.into_iter().map(vector).collect();
    let report = core_uniformity_report(&xs, &polytope.inner, seed).map_err(to_py_err)?;
    to_py(py, &report)
}

/// Geodesic and Dikin walk acceptance and autocorrelation over `h_grid`.
#[pyfunction]
#[pyo3(signature = (polytope, h_grid, steps, seed=0))]
fn compare_walks<'py>(py: Python<'py>, polytope: &PyPolytope, h_grid: Vec<f64>, steps: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let mut base = WalkConfig::with_step_size(1.0);
    base.record_timing = false;
    let table = py
        .detach(|| compare_walks_with(&polytope.inner, &h_grid, steps, seed, &base))
        .map_err(to_py_err)?;
    to_py(py, &table)
}

/// Physarum dynamics for `min cᵀx, Ax = b, x ≥ 0` from `x0` up to time `t_final`.
#[pyfunction]
#[pyo3(signature = (a, b, c, x0, t_final, eps=DEFAULT_TOLERANCE))]
fn physarum_solve<'py>(
    py: Python<'py>,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
    x0: Vec<f64>,
    t_final: f64,
    eps: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let prob = PhysarumProblem::new(matrix(&a)?, vector(b), vector(c), vector(x0)).map_err(to_py_err)?;
    CollocationConfig::with_tolerance(eps).validate().map_err(to_py_err)?;
    let sol = py.detach(|| core_physarum_solve(&prob, t_final, eps)).map_err(to_py_err)?;
    to_py(py, &sol)
}

#[pymodule]
fn hessian_walk_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolytope>()?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(geodesic_step, m)?)?;
    m.add_function(wrap_pyfunction!(uniformity_report, m)?)?;
    m.add_function(wrap_pyfunction!(compare_walks, m)?)?;
    m.add_function(wrap_pyfunction!(physarum_solve, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
