use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use hessian_walk::diagnostics::{compare_walks_with, uniformity_report};
use hessian_walk::io::{parse_vector, read_samples, to_json_pretty, write_json, write_samples, write_text};
use hessian_walk::physarum::{physarum_solve_with, PhysarumProblem, DEFAULT_CHECKPOINTS, DEFAULT_TOLERANCE};
use hessian_walk::walk::{propose_with_velocity, run_chain, FailReason};
use hessian_walk::{analytic_center, CollocationConfig, DVector, ManifoldPoint, Polytope, WalkConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::manifest::{absolute, relocate, sibling, suffixed, ConfigEcho, RunManifest, VERSION};

fn load_polytope(path: &Path) -> CliResult<Polytope> {
    Polytope::load(path).map_err(|e| CliError::input("polytope", e))
}

fn ensure_parent(path: &Path) -> CliResult<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            std::fs::create_dir_all(dir).map_err(|e| CliError::input(&dir.display().to_string(), e))
        }
        _ => Ok(()),
    }
}

fn write_out_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    ensure_parent(path)?;
    write_json(path, value).map_err(|e| CliError::input("writing output", e))
}

fn write_out_text(path: &Path, text: &str) -> CliResult<()> {
    ensure_parent(path)?;
    write_text(path, text).map_err(|e| CliError::input("writing output", e))
}

/// A vector given inline (`0.1,0.2`) or as a path to a file holding one.
fn vector_arg(what: &str, value: &str) -> CliResult<DVector<f64>> {
    let text = if Path::new(value).is_file() {
        std::fs::read_to_string(value).map_err(|e| CliError::input(what, e))?
    } else {
        value.to_string()
    };
    parse_vector(&text).map_err(|e| CliError::input(what, e))
}

/// `--degree` and `--eps` applied on top of the library defaults.
fn collocation(degree: Option<usize>, eps: Option<f64>) -> CollocationConfig {
    let mut cfg = match eps {
        Some(eps) => CollocationConfig::with_tolerance(eps),
        None => CollocationConfig::default(),
    };
    if let Some(d) = degree {
        cfg.degree = d;
    }
    cfg
}

fn args_value<T: Serialize>(args: &T) -> CliResult<serde_json::Value> {
    serde_json::to_value(args).map_err(|e| CliError::input("arguments", e))
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SampleArgs {
    /// Polytope JSON `{"A": [[..]], "b": [..]}`.
    #[arg(long)]
    pub polytope: PathBuf,
    /// Post-burn-in steps per chain.
    #[arg(long)]
    pub steps: usize,
    /// Step size; defaults to 0.1/n^(3/4).
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "samples.csv")]
    pub out: PathBuf,
    /// Defaults to `<out>.stats.json`.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// Defaults to `<out>.manifest.json`.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Defaults to 10·ceil(1/h).
    #[arg(long)]
    pub burnin: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    /// `center` or a file holding the start point.
    #[arg(long, default_value = "center")]
    pub start: String,
    /// Collocation nodes per interval.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Collocation accuracy.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Independent chains with seeds `seed + k`, run concurrently.
    #[arg(long, default_value_t = 1)]
    pub chains: usize,
    /// Leave wall times out of stats and manifest.
    #[arg(long)]
    pub no_timing: bool,
}

impl SampleArgs {
    fn relocate(&mut self, dir: &Path) {
        self.out = relocate(&self.out, dir);
        self.stats = self.stats.as_ref().map(|p| relocate(p, dir));
        self.manifest = self.manifest.as_ref().map(|p| relocate(p, dir));
    }

    fn config(&self, n: usize) -> CliResult<WalkConfig> {
        let mut cfg = match self.h {
            Some(h) => WalkConfig::with_step_size(h),
            None => WalkConfig::for_dimension(n),
        };
        cfg.collocation = collocation(self.degree, self.eps);
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if self.burnin.is_some() {
            cfg.burn_in = self.burnin;
        }
        if let Some(thin) = self.thin {
            cfg.thin = thin;
        }
        cfg.record_timing = !self.no_timing;
        cfg.validate().map_err(|e| CliError::input("configuration", e))?;
        if self.chains == 0 {
            return Err(CliError::Config("--chains must be >= 1".into()));
        }
        Ok(cfg)
    }
}

pub fn cmd_sample(args: &SampleArgs) -> CliResult<()> {
    let clock = Instant::now();
    let p = load_polytope(&args.polytope)?;
    let cfg = args.config(p.n())?;
    let start = if args.start == "center" {
        analytic_center(&p, None, &cfg.tolerances)
            .map_err(|e| CliError::compute("analytic center", e))?
            .x()
            .clone()
    } else {
        let x = vector_arg("start point", &args.start)?;
        ManifoldPoint::with_tolerances(&p, x.clone(), &cfg.tolerances).map_err(|e| CliError::compute("start point", e))?;
        x
    };

    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..args.chains)
            .map(|k| {
                let mut c = cfg.clone();
                c.seed = cfg.seed.wrapping_add(k as u64);
                let (p, start) = (&p, &start);
                s.spawn(move || run_chain(p, start, args.steps, &c))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("chain thread panicked")).collect()
    });

    let stats_base = args.stats.clone().unwrap_or_else(|| sibling(&args.out, "stats.json"));
    let mut outputs = Vec::new();
    for (k, result) in results.into_iter().enumerate() {
        let chain = result.map_err(|e| CliError::compute(&format!("chain {k}"), e))?;
        let (out, stats) = if args.chains == 1 {
            (args.out.clone(), stats_base.clone())
        } else {
            (suffixed(&args.out, k), suffixed(&stats_base, k))
        };
        ensure_parent(&out)?;
        write_samples(&out, p.n(), &chain.samples).map_err(|e| CliError::input("writing samples", e))?;
        write_out_json(&stats, &chain.stats)?;
        if chain.stats.zero_acceptance {
            eprintln!("warning: chain {k} accepted no proposals; h = {} is too large", cfg.step_size);
        }
        println!(
            "chain {k}: {} samples, acceptance {:.4}, seed {} -> {}",
            chain.samples.len(),
            chain.stats.accept_rate,
            chain.stats.seed,
            out.display()
        );
        outputs.push(out);
        outputs.push(stats);
    }

    let mut echo_args = args.clone();
    echo_args.polytope = absolute(&args.polytope);
    if args.start != "center" && Path::new(&args.start).is_file() {
        echo_args.start = absolute(Path::new(&args.start)).display().to_string();
    }
    let manifest = RunManifest {
        command: "sample".into(),
        polytope: Some(echo_args.polytope.clone()),
        config: ConfigEcho {
            h: Some(cfg.step_size),
            degree: Some(cfg.collocation.degree),
            tolerance: Some(cfg.collocation.tolerance),
            seed: Some(cfg.seed),
            steps: Some(args.steps),
            burn_in: Some(cfg.burn_in_steps()),
            thin: Some(cfg.thin),
            chains: Some(args.chains),
        },
        outputs,
        version: VERSION.into(),
        wall_time_s: cfg.record_timing.then(|| clock.elapsed().as_secs_f64()),
        args: args_value(&echo_args)?,
    };
    let path = args.manifest.clone().unwrap_or_else(|| sibling(&args.out, "manifest.json"));
    ensure_parent(&path)?;
    manifest.write(&path)
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GeodesicArgs {
    #[arg(long)]
    pub polytope: PathBuf,
    /// Start point, inline (`0.1,0.2`) or a file.
    #[arg(long)]
    pub x: String,
    /// Unscaled initial velocity `v_x`, inline or a file.
    #[arg(long)]
    pub v: String,
    #[arg(long)]
    pub h: f64,
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Also write the report to this file.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct GeodesicReport {
    x: Vec<f64>,
    v_x: Vec<f64>,
    h: f64,
    endpoint: Vec<f64>,
    reverse_velocity: Vec<f64>,
    logdet_dexp_fwd: f64,
    logdet_dexp_rev: f64,
    v_gamma: f64,
    log_density_fwd: f64,
    log_density_rev: f64,
    log_ratio: f64,
    ratio: f64,
    accept_probability: f64,
}

#[derive(Debug, Serialize)]
struct GeodesicFailure {
    error: &'static str,
    detail: String,
}

pub fn cmd_geodesic(args: &GeodesicArgs) -> CliResult<()> {
    let p = load_polytope(&args.polytope)?;
    let x = vector_arg("--x", &args.x)?;
    let v = vector_arg("--v", &args.v)?;
    if x.len() != p.n() || v.len() != p.n() {
        return Err(CliError::Config(format!("--x and --v need {} entries", p.n())));
    }
    let mut cfg = WalkConfig::with_step_size(args.h);
    cfg.collocation = collocation(args.degree, args.eps);
    cfg.validate().map_err(|e| CliError::input("configuration", e))?;
    let point = ManifoldPoint::with_tolerances(&p, x.clone(), &cfg.tolerances).map_err(|e| CliError::compute("--x", e))?;
    let step = propose_with_velocity(&p, &point, &v, &cfg);
    if let Some(reason) = step.failure {
        let failure = GeodesicFailure {
            error: match reason {
                FailReason::Exit => "exited polytope",
                FailReason::Singular => "singular Jacobi matrix",
                FailReason::NonContraction => "collocation did not contract",
            },
            detail: step.error.as_ref().map(|e| e.to_string()).unwrap_or_default(),
        };
        let text = serde_json::to_string(&failure).map_err(|e| CliError::input("report", e))?;
        return Err(CliError::Numerical(text));
    }
    let (Some(y), Some(v_y)) = (&step.to, &step.v_y) else {
        return Err(CliError::Numerical("proposal has no endpoint".into()));
    };
    let log_ratio = step.log_ratio();
    let report = GeodesicReport {
        x: x.iter().copied().collect(),
        v_x: v.iter().copied().collect(),
        h: args.h,
        endpoint: y.x().iter().copied().collect(),
        reverse_velocity: v_y.iter().copied().collect(),
        logdet_dexp_fwd: step.logdet_dexp_fwd,
        logdet_dexp_rev: step.logdet_dexp_rev,
        v_gamma: step.v_gamma,
        log_density_fwd: step.log_fwd,
        log_density_rev: step.log_rev,
        log_ratio,
        ratio: log_ratio.exp(),
        accept_probability: log_ratio.exp().min(1.0),
    };
    let text = to_json_pretty(&report).map_err(|e| CliError::input("report", e))?;
    print!("{text}");
    if let Some(path) = &args.json {
        write_out_text(path, &text)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PhysarumArgs {
    /// Problem JSON `{"A": [[..]], "b": [..], "c": [..], "x0": [..]}`.
    #[arg(long)]
    pub problem: PathBuf,
    /// Final time T.
    #[arg(long = "time")]
    pub t_final: f64,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub degree: Option<usize>,
    /// Trajectory rows after t = 0.
    #[arg(long)]
    pub checkpoints: Option<usize>,
    #[arg(long, default_value = "trajectory.csv")]
    pub out: PathBuf,
    /// Defaults to `<out>.summary.json`.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Defaults to `<out>.manifest.json`.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub no_timing: bool,
}

impl PhysarumArgs {
    fn relocate(&mut self, dir: &Path) {
        self.out = relocate(&self.out, dir);
        self.summary = self.summary.as_ref().map(|p| relocate(p, dir));
        self.manifest = self.manifest.as_ref().map(|p| relocate(p, dir));
    }
}

#[derive(Debug, Serialize)]
struct PhysarumSummary<'a> {
    t_final: f64,
    x: &'a [f64],
    objective: f64,
    max_infeasibility: f64,
    objective_increases: &'a [f64],
    vanished: &'a [usize],
    halvings: usize,
    collocation_steps: usize,
}

pub fn cmd_physarum(args: &PhysarumArgs) -> CliResult<()> {
    let clock = Instant::now();
    let prob = PhysarumProblem::load(&args.problem).map_err(|e| CliError::input("problem", e))?;
    if !(args.t_final >= 0.0 && args.t_final.is_finite()) {
        return Err(CliError::Config("--time must be finite and >= 0".into()));
    }
    let cfg = collocation(args.degree, Some(args.eps.unwrap_or(DEFAULT_TOLERANCE)));
    let checkpoints = args.checkpoints.unwrap_or(DEFAULT_CHECKPOINTS);
    let sol = physarum_solve_with(&prob, args.t_final, &cfg, checkpoints)
        .map_err(|e| CliError::compute("physarum", e))?;
    if !sol.objective_increases.is_empty() {
        eprintln!(
            "warning: objective increased at {} checkpoint(s), first at t = {}",
            sol.objective_increases.len(),
            sol.objective_increases[0]
        );
    }
    write_out_text(&args.out, &sol.trajectory_csv())?;
    let summary_path = args.summary.clone().unwrap_or_else(|| sibling(&args.out, "summary.json"));
    write_out_json(
        &summary_path,
        &PhysarumSummary {
            t_final: sol.t_final,
            x: &sol.x,
            objective: sol.objective,
            max_infeasibility: sol.max_infeasibility,
            objective_increases: &sol.objective_increases,
            vanished: &sol.vanished,
            halvings: sol.halvings,
            collocation_steps: sol.collocation_steps,
        },
    )?;
    println!(
        "T = {}: objective {}, max |Ax - b| {:e} -> {}",
        sol.t_final,
        sol.objective,
        sol.max_infeasibility,
        args.out.display()
    );
    let mut echo = args.clone();
    echo.problem = absolute(&args.problem);
    let manifest = RunManifest {
        command: "physarum".into(),
        polytope: None,
        config: ConfigEcho {
            degree: Some(cfg.degree),
            tolerance: Some(cfg.tolerance),
            ..ConfigEcho::default()
        },
        outputs: vec![args.out.clone(), summary_path],
        version: VERSION.into(),
        wall_time_s: (!args.no_timing).then(|| clock.elapsed().as_secs_f64()),
        args: args_value(&echo)?,
    };
    let path = args.manifest.clone().unwrap_or_else(|| sibling(&args.out, "manifest.json"));
    manifest.write(&path)
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DiagnoseArgs {
    #[arg(long)]
    pub polytope: PathBuf,
    /// Sample CSV with a header row.
    #[arg(long)]
    pub samples: PathBuf,
    /// Seed for the projection directions and reference draws.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "report.json")]
    pub out: PathBuf,
    /// Defaults to `<out>.manifest.json`.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

impl DiagnoseArgs {
    fn relocate(&mut self, dir: &Path) {
        self.out = relocate(&self.out, dir);
        self.manifest = self.manifest.as_ref().map(|p| relocate(p, dir));
    }
}

pub fn cmd_diagnose(args: &DiagnoseArgs) -> CliResult<()> {
    let p = load_polytope(&args.polytope)?;
    let (n, samples) = read_samples(&args.samples).map_err(|e| CliError::input("samples", e))?;
    if n != p.n() {
        return Err(CliError::Config(format!("samples have {n} columns, polytope has dimension {}", p.n())));
    }
    let report = uniformity_report(&samples, &p, args.seed).map_err(|e| CliError::compute("diagnose", e))?;
    write_out_json(&args.out, &report)?;
    println!(
        "{}: {} of {} projections pass, moments {} -> {}",
        if report.passed { "uniform" } else { "NOT uniform" },
        report.projections_passed,
        report.projections.len(),
        match report.moments_ok {
            Some(true) => "ok",
            Some(false) => "off",
            None => "not checked",
        },
        args.out.display()
    );
    let mut echo = args.clone();
    echo.polytope = absolute(&args.polytope);
    echo.samples = absolute(&args.samples);
    let manifest = RunManifest {
        command: "diagnose".into(),
        polytope: Some(echo.polytope.clone()),
        config: ConfigEcho {
            seed: Some(args.seed),
            ..ConfigEcho::default()
        },
        outputs: vec![args.out.clone()],
        version: VERSION.into(),
        wall_time_s: None,
        args: args_value(&echo)?,
    };
    manifest.write(&args.manifest.clone().unwrap_or_else(|| sibling(&args.out, "manifest.json")))
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CompareArgs {
    #[arg(long)]
    pub polytope: PathBuf,
    /// Comma-separated step sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub h_grid: Vec<f64>,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "compare.csv")]
    pub out: PathBuf,
    /// Also write the table as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Defaults to `<out>.manifest.json`.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
}

impl CompareArgs {
    fn relocate(&mut self, dir: &Path) {
        self.out = relocate(&self.out, dir);
        self.json = self.json.as_ref().map(|p| relocate(p, dir));
        self.manifest = self.manifest.as_ref().map(|p| relocate(p, dir));
    }
}

pub fn cmd_compare(args: &CompareArgs) -> CliResult<()> {
    let p = load_polytope(&args.polytope)?;
    if args.h_grid.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
        return Err(CliError::Config("--h-grid entries must be positive".into()));
    }
    let mut base = WalkConfig::with_step_size(1.0);
    base.collocation = collocation(args.degree, args.eps);
    base.record_timing = false;
    let table = compare_walks_with(&p, &args.h_grid, args.steps, args.seed, &base)
        .map_err(|e| CliError::compute("compare", e))?;
    write_out_text(&args.out, &table.to_csv())?;
    if let Some(path) = &args.json {
        write_out_json(path, &table)?;
    }
    print!("{}", table.to_csv());
    let mut echo = args.clone();
    echo.polytope = absolute(&args.polytope);
    let mut outputs = vec![args.out.clone()];
    outputs.extend(args.json.clone());
    let manifest = RunManifest {
        command: "compare".into(),
        polytope: Some(echo.polytope.clone()),
        config: ConfigEcho {
            degree: Some(base.collocation.degree),
            tolerance: Some(base.collocation.tolerance),
            seed: Some(args.seed),
            steps: Some(args.steps),
            burn_in: Some(table.burn_in),
            ..ConfigEcho::default()
        },
        outputs,
        version: VERSION.into(),
        wall_time_s: None,
        args: args_value(&echo)?,
    };
    manifest.write(&args.manifest.clone().unwrap_or_else(|| sibling(&args.out, "manifest.json")))
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Write outputs (and the new manifest) under this directory instead.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

fn replay_args<T: serde::de::DeserializeOwned>(m: &RunManifest) -> CliResult<T> {
    serde_json::from_value(m.args.clone()).map_err(|e| CliError::input("manifest arguments", e))
}

pub fn cmd_replay(args: &ReplayArgs) -> CliResult<()> {
    let m = RunManifest::load(&args.manifest)?;
    match m.command.as_str() {
        "sample" => {
            let mut a: SampleArgs = replay_args(&m)?;
            if let Some(dir) = &args.out_dir {
                a.manifest.get_or_insert_with(|| sibling(&a.out, "manifest.json"));
                a.stats.get_or_insert_with(|| sibling(&a.out, "stats.json"));
                a.relocate(dir);
            }
            cmd_sample(&a)
        }
        "physarum" => {
            let mut a: PhysarumArgs = replay_args(&m)?;
            if let Some(dir) = &args.out_dir {
                a.manifest.get_or_insert_with(|| sibling(&a.out, "manifest.json"));
                a.summary.get_or_insert_with(|| sibling(&a.out, "summary.json"));
                a.relocate(dir);
            }
            cmd_physarum(&a)
        }
        "diagnose" => {
            let mut a: DiagnoseArgs = replay_args(&m)?;
            if let Some(dir) = &args.out_dir {
                a.manifest.get_or_insert_with(|| sibling(&a.out, "manifest.json"));
                a.relocate(dir);
            }
            cmd_diagnose(&a)
        }
        "compare" => {
            let mut a: CompareArgs = replay_args(&m)?;
            if let Some(dir) = &args.out_dir {
                a.manifest.get_or_insert_with(|| sibling(&a.out, "manifest.json"));
                a.relocate(dir);
            }
            cmd_compare(&a)
        }
        other => Err(CliError::Config(format!("cannot replay command `{other}`"))),
    }
}
