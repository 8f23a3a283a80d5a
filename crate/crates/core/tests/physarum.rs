mod common;

use common::*;
use hessian_walk::physarum::*;
use hessian_walk::*;
use rand::Rng;

fn tiny() -> PhysarumProblem {
    PhysarumProblem::new(
        DMatrix::from_row_slice(1, 2, &[1.0, 1.0]),
        DVector::from_vec(vec![1.0]),
        DVector::from_vec(vec![2.0, 1.0]),
        DVector::from_vec(vec![0.5, 0.5]),
    )
    .unwrap()
}

fn random_lp(seed: u64) -> PhysarumProblem {
    let mut r = rng(seed);
    let n = 3 + (seed % 4) as usize;
    let m = 1 + (seed % 3) as usize;
    let a = DMatrix::from_fn(m, n, |_, _| r.random_range(-1.0..2.0));
    let x0 = DVector::from_fn(n, |_, _| r.random_range(0.2..1.0));
    let b = &a * &x0;
    let c = DVector::from_fn(n, |_, _| r.random_range(0.5..3.0));
    PhysarumProblem::new(a, b, c, x0).unwrap()
}

#[test]
fn rhs_against_dense_formula() {
    let p = random_lp(3);
    let x = p.x0().clone();
    let w = DMatrix::from_diagonal(&x.component_div(p.c()));
    let m = p.a() * &w * p.a().transpose();
    let dense = &w * p.a().transpose() * m.try_inverse().unwrap() * p.b() - &x;
    let fast = physarum_rhs(&x, &p).unwrap();
    assert!((fast - dense).amax() < 1e-12);
}

#[test]
fn rhs_keeps_constraints() {
    for seed in 0..10 {
        let p = random_lp(seed);
        let r = physarum_rhs(p.x0(), &p).unwrap();
        assert!((p.a() * r).amax() < 1e-12, "seed {seed}");
    }
}

#[test]
fn rhs_rejects_nonpositive_state() {
    let p = tiny();
    assert!(physarum_rhs(&DVector::from_vec(vec![0.0, 1.0]), &p).is_err());
}

#[test]
fn tiny_lp_matches_rk4() {
    let p = tiny();
    let sol = physarum_solve(&p, 10.0, 1e-10).unwrap();
    let oracle = rk4(|_, x| physarum_rhs(x, &p).unwrap(), p.x0(), 10.0, 20_000);
    for i in 0..2 {
        assert!((sol.x[i] - oracle[i]).abs() < 1e-5 * oracle[i].max(1e-3), "{:?} vs {oracle}", sol.x);
    }
    assert!(sol.x[0] < 0.01 && sol.x[1] > 0.99);
}

#[test]
fn log_and_raw_solvers_agree() {
    let p = random_lp(5);
    let cfg = CollocationConfig::with_tolerance(1e-11);
    let a = physarum_solve_with(&p, 3.0, &cfg, 10).unwrap();
    let b = physarum_solve_raw(&p, 3.0, &cfg, 10).unwrap();
    for (u, v) in a.x.iter().zip(&b.x) {
        assert!((u - v).abs() < 1e-7 * v.abs().max(1e-3));
    }
}

#[test]
fn objective_conserved_when_cost_in_row_space() {
    let p = PhysarumProblem::new(
        DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]),
        DVector::from_vec(vec![1.0]),
        DVector::from_vec(vec![2.0, 2.0, 2.0]),
        DVector::from_vec(vec![0.2, 0.3, 0.5]),
    )
    .unwrap();
    let s = physarum_solve(&p, 5.0, 1e-10).unwrap();
    for c in &s.trajectory {
        assert!((c.objective - 2.0).abs() < 1e-9);
    }
}

#[test]
fn objective_stays_above_vertex_optimum() {
    for seed in 0..12 {
        let p = random_lp(seed);
        let opt = lp_vertex_opt(p.a(), p.b(), p.c());
        let s = physarum_solve(&p, 8.0, 1e-10).unwrap();
        assert!(s.max_infeasibility < 1e-8, "seed {seed}");
        for c in &s.trajectory {
            assert!(c.objective >= opt - 1e-9, "seed {seed}: {} < {opt}", c.objective);
            assert!(c.x.iter().all(|&v| v > 0.0));
        }
    }
}

#[test]
fn trajectory_csv_shape() {
    let s = physarum_solve(&tiny(), 2.0, 1e-10).unwrap();
    let csv = s.trajectory_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,x0,x1,objective,infeasibility");
    assert_eq!(lines.count(), s.trajectory.len());
    assert_eq!(s.trajectory.len(), 101);
}
