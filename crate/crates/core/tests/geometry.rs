mod common;

use common::*;
use hessian_walk::collocation::collocation_multistep;
use hessian_walk::diagnostics::*;
use hessian_walk::geometry::{
    frame_curvature_matrix, hilbert_distance, parallel_transport_rhs, ricci, riemann_inner,
};
use hessian_walk::point::orthonormalize_in_metric;
use hessian_walk::walk::{solve_geodesic, GeodesicSpec};
use hessian_walk::*;
use proptest::prelude::*;

fn instance(seed: u64) -> (Polytope, ManifoldPoint, ChaCha) {
    let mut r = rng(seed);
    let n = 1 + (seed % 6) as usize;
    let m = 2 * n + (seed % 9) as usize;
    let p = random_polytope(&mut r, n, m.min(20));
    let x = random_interior(&mut r, &p);
    let pt = make_point(&p, x).unwrap();
    (p, pt, r)
}

type ChaCha = rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leverage_sums_to_dimension(seed in any::<u64>()) {
        let (p, x, _) = instance(seed);
        let s = x.leverage();
        prop_assert!((s.sum() - p.n() as f64).abs() < 1e-8);
        prop_assert!(s.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v)));
        let dense = dense_leverage(&p, x.x()).unwrap();
        prop_assert!(vec_rel_err(s, &dense) < 1e-8);
    }

    #[test]
    fn drift_matches_dense_oracle(seed in any::<u64>()) {
        let (p, x, _) = instance(seed);
        let d = dense_drift(&p, x.x()).unwrap();
        prop_assert!(vec_rel_err(x.drift(), &d) < 1e-8);
    }

    #[test]
    fn christoffel_matches_index_sum(seed in any::<u64>()) {
        let (p, x, mut r) = instance(seed);
        let u = gaussian(&mut r, p.n());
        let v = gaussian(&mut r, p.n());
        let fast = hessian_walk::geometry::christoffel_action(&x, &u, &v);
        let slow = christoffel_index_sum(&p, x.x(), &u, &v).unwrap();
        prop_assert!(vec_rel_err(&fast, &slow) < 1e-8);
    }

    #[test]
    fn riemann_symmetries(seed in any::<u64>()) {
        let (p, x, mut r) = instance(seed);
        let n = p.n();
        let (u, v, w, z) = (gaussian(&mut r, n), gaussian(&mut r, n), gaussian(&mut r, n), gaussian(&mut r, n));
        let base = riemann_inner(&x, &u, &v, &w, &z);
        let scale = base.abs().max(1.0);
        prop_assert!((base + riemann_inner(&x, &v, &u, &w, &z)).abs() < 1e-10 * scale);
        prop_assert!((base + riemann_inner(&x, &u, &v, &z, &w)).abs() < 1e-10 * scale);
        prop_assert!((base - riemann_inner(&x, &w, &z, &u, &v)).abs() < 1e-10 * scale);
        let bianchi = base + riemann_inner(&x, &v, &w, &u, &z) + riemann_inner(&x, &w, &u, &v, &z);
        prop_assert!(bianchi.abs() < 1e-10 * scale);
    }

    #[test]
    fn ricci_is_trace_of_frame_curvature(seed in any::<u64>()) {
        let (p, x, mut r) = instance(seed);
        let v = gaussian(&mut r, p.n());
        let op = frame_curvature_matrix(&x, &v, &x.orthonormal_frame(), &Tolerances::default()).unwrap();
        let ric = ricci(&x, &v);
        prop_assert!((op.trace() - ric).abs() < 1e-9 * ric.abs().max(1.0));
        prop_assert!((&op.matrix - op.matrix.transpose()).amax() < 1e-10 * op.frobenius().max(1.0));
    }

    #[test]
    fn hilbert_distance_matches_bisection(seed in any::<u64>()) {
        let (p, x, mut r) = instance(seed);
        let y = random_interior(&mut r, &p);
        let fast = hilbert_distance(&p, x.x(), &y).unwrap();
        let slow = hilbert_distance_bisection(&p, x.x(), &y).unwrap();
        prop_assert!((fast - slow).abs() < 1e-8 * fast.max(1.0));
        prop_assert!((fast - hilbert_distance(&p, &y, x.x()).unwrap()).abs() < 1e-10 * fast.max(1.0));
    }

    #[test]
    fn orthonormalized_frame_is_orthonormal(seed in any::<u64>()) {
        let (p, x, mut r) = instance(seed);
        let n = p.n();
        let mut f = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 }) + DMatrix::from_fn(n, n, |_, _| 0.1 * gaussian(&mut r, 1)[0]);
        orthonormalize_in_metric(&x, &mut f).unwrap();
        let gram = f.transpose() * x.metric() * &f;
        prop_assert!((gram - DMatrix::identity(n, n)).amax() < 1e-10);
    }
}

#[test]
fn riemann_matches_index_sum_on_random_instances() {
    for seed in 0..30 {
        let (p, x, mut r) = instance(seed);
        let n = p.n();
        let (u, v, w, z) = (gaussian(&mut r, n), gaussian(&mut r, n), gaussian(&mut r, n), gaussian(&mut r, n));
        let fast = riemann_inner(&x, &u, &v, &w, &z);
        let slow = riemann_index_sum(&p, x.x(), &u, &v, &w, &z).unwrap();
        assert!((fast - slow).abs() <= 1e-8 * slow.abs().max(1e-4), "seed {seed}: {fast} vs {slow}");
        let ric = ricci(&x, &u);
        let ric_slow = ricci_index_sum(&p, x.x(), &u).unwrap();
        assert!((ric - ric_slow).abs() <= 1e-8 * ric_slow.abs().max(1e-4), "seed {seed}: {ric} vs {ric_slow}");
    }
}

#[test]
fn metric_log_det_matches_eigenvalues() {
    for seed in 0..20 {
        let (p, x, _) = instance(seed);
        let g = dense_metric(&p, x.x()).unwrap();
        assert!(vec_rel_err(
            &DVector::from_column_slice(x.metric().as_slice()),
            &DVector::from_column_slice(g.as_slice())
        ) < 1e-10);
        assert!((x.log_det_metric() - log_det_eigen(&p, x.x()).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn parallel_transport_preserves_metric_norm() {
    let tol = Tolerances::default();
    for seed in 0..5 {
        let (p, x, mut r) = instance(seed + 100);
        let n = p.n();
        let mut vel = gaussian(&mut r, n);
        vel /= x.metric_norm(&vel) * 2.0;
        let len = 1.0;
        let cfg = CollocationConfig::default();
        let path = solve_geodesic(&p, &x, &vel, len, &cfg, 12, &tol).unwrap();
        let v0 = gaussian(&mut r, n);
        let norm0 = x.metric_norm(&v0);
        // Transport as a 1st-order ODE in (v) with the path sampled directly.
        let sol = collocation_multistep(
            |v, t| {
                let pt = make_point(&p, path.position(t).unwrap()).unwrap();
                parallel_transport_rhs(&pt, &path.velocity(t).unwrap(), v)
            },
            &v0,
            len,
            &CollocationConfig { interval: 0.25, ..cfg },
            None,
        )
        .unwrap();
        for k in 0..=8 {
            let t = len * k as f64 / 8.0;
            let pt = make_point(&p, path.position(t).unwrap()).unwrap();
            let v = sol.curve.eval(t).unwrap();
            assert!((pt.metric_norm(&v) - norm0).abs() < 1e-8 * norm0, "seed {seed} t {t}");
        }
    }
}

#[test]
fn geodesic_has_constant_speed_and_reverses() {
    let tol = Tolerances::default();
    let cfg = WalkConfig::with_step_size(0.05);
    for seed in 0..8 {
        let (p, x, mut r) = instance(seed + 200);
        let n = p.n();
        let v_x = x.inverse_factor_transpose(&gaussian(&mut r, n)) * 0.2;
        let spec = GeodesicSpec::new(&x, &v_x, 0.05).unwrap();
        let path = match spec.solve(&p, &cfg) {
            Ok(path) => path,
            Err(e) => panic!("seed {seed}: {e}"),
        };
        let speed0 = x.metric_norm(&path.initial_velocity);
        for k in 0..=10 {
            let t = path.len * k as f64 / 10.0;
            let pt = make_point(&p, path.position(t).unwrap()).unwrap();
            let s = pt.metric_norm(&path.velocity(t).unwrap());
            assert!((s - speed0).abs() < 1e-8 * speed0.max(1e-12), "seed {seed}");
        }
        let back = solve_geodesic(&p, &path.end, &(-&path.end_velocity), path.len, &cfg.collocation, 12, &tol).unwrap();
        assert!((back.end.x() - x.x()).amax() < 1e-9, "seed {seed}");
    }
}
