mod common;

use common::*;
use hessian_walk::diagnostics::*;
use hessian_walk::*;

#[test]
fn rejection_samples_pass_uniformity() {
    for (seed, p) in [
        (1, Polytope::hypercube(3).unwrap()),
        (2, Polytope::standard_simplex(2).unwrap()),
        (3, random_polytope(&mut rng(3), 3, 10)),
    ] {
        let samples = rejection_samples(&p, 4000, &mut rng(100 + seed)).unwrap();
        let rep = uniformity_report(&samples, &p, seed).unwrap();
        assert!(rep.passed, "seed {seed}: {} projections", rep.projections_passed);
        for c in &rep.coordinates {
            // Several coordinates at 3σ fail jointly about 1% of the time.
            assert!(c.mean_z.is_none_or(|z| z.abs() < 4.0), "seed {seed}: {c:?}");
            assert!(c.ess > 1000.0);
        }
    }
}

#[test]
fn biased_samples_fail_uniformity() {
    let p = Polytope::hypercube(2).unwrap();
    let samples: Vec<DVector<f64>> = rejection_samples(&p, 4000, &mut rng(4))
        .unwrap()
        .into_iter()
        .map(|x| x.map(|v| v.abs().sqrt() * v.signum()))
        .collect();
    let rep = uniformity_report(&samples, &p, 4).unwrap();
    assert!(!rep.passed);
}

#[test]
fn simplex_moments_closed_form() {
    let p = Polytope::standard_simplex(3).unwrap();
    let (mean, var) = exact_moments(&p).unwrap();
    // Dirichlet(1,1,1,1) marginal: Beta(1, 3).
    assert!((mean[0] - 0.25).abs() < 1e-15);
    assert!((var[0] - 3.0 / 80.0).abs() < 1e-15);
    let samples = rejection_samples(&p, 200_000, &mut rng(5)).unwrap();
    let m0 = samples.iter().map(|s| s[0]).sum::<f64>() / samples.len() as f64;
    assert!((m0 - 0.25).abs() < 0.003);
}

#[test]
fn report_serialises() {
    let p = Polytope::hypercube(2).unwrap();
    let samples = rejection_samples(&p, 1000, &mut rng(6)).unwrap();
    let rep = uniformity_report(&samples, &p, 1).unwrap();
    let text = serde_json::to_string(&rep).unwrap();
    let back: UniformityReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back.samples, 1000);
}

#[test]
fn drift_is_newton_step_of_volumetric_barrier() {
    let mut r = rng(7);
    for _ in 0..10 {
        let p = random_polytope(&mut r, 3, 10);
        let x = make_point(&p, random_interior(&mut r, &p)).unwrap();
        let fd = drift_finite_difference(&p, x.x(), 1e-5).unwrap();
        assert!(vec_rel_err(x.drift(), &fd) < 1e-4);
    }
}

#[test]
fn ess_of_ar1_chain() {
    // AR(1) with ρ = 0.9 has τ = (1 + ρ)/(1 − ρ) = 19.
    let mut r = rng(8);
    let mut x = 0.0;
    let series: Vec<f64> = (0..200_000)
        .map(|_| {
            x = 0.9 * x + gaussian(&mut r, 1)[0];
            x
        })
        .collect();
    let tau = integrated_autocorrelation_time(&series);
    assert!((tau - 19.0).abs() < 2.0, "{tau}");
}
