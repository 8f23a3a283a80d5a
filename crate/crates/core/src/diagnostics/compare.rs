//! Side-by-side runs of the geodesic walk and the Dikin walk.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::uniformity::integrated_autocorrelation_time;
use crate::center::analytic_center;
use crate::config::WalkConfig;
use crate::error::Result;
use crate::polytope::Polytope;
use crate::walk::{run_chain_with_rng, run_dikin_chain, seeded_rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub h: f64,
    pub geodesic_accept: f64,
    pub geodesic_iat: f64,
    /// Dikin radius `√(n·h)`, the Euclidean-in-metric step length of the
    /// geodesic walk at the same `h`.
    pub dikin_r: f64,
    pub dikin_accept: f64,
    pub dikin_iat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareTable {
    pub steps: usize,
    pub burn_in: usize,
    pub seed: u64,
    /// Unit direction whose projection is used for the autocorrelation.
    pub direction: Vec<f64>,
    pub rows: Vec<CompareRow>,
}

impl CompareTable {
    pub const CSV_HEADER: &'static str = "h,geodesic_accept,geodesic_iat,dikin_r,dikin_accept,dikin_iat";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.h, r.geodesic_accept, r.geodesic_iat, r.dikin_r, r.dikin_accept, r.dikin_iat
            ));
        }
        out
    }

    /// Largest `h` with geodesic acceptance at least `level`.
    pub fn largest_geodesic_h(&self, level: f64) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.geodesic_accept >= level)
            .map(|r| r.h)
            .reduce(f64::max)
    }

    /// Largest `h` with Dikin acceptance at least `level`.
    pub fn largest_dikin_h(&self, level: f64) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.dikin_accept >= level)
            .map(|r| r.h)
            .reduce(f64::max)
    }
}

/// Both walks from the analytic center for every `h` in the grid, with
/// `steps / 10` discarded burn-in steps. The geodesic walk uses the
/// default collocation settings.
pub fn compare_walks(p: &Polytope, h_grid: &[f64], steps: usize, seed: u64) -> Result<CompareTable> {
    let mut cfg = WalkConfig::with_step_size(1.0);
    cfg.record_timing = false;
    compare_walks_with(p, h_grid, steps, seed, &cfg)
}

/// As [`compare_walks`], taking everything except `step_size`, `seed` and
/// `burn_in` from `base`.
pub fn compare_walks_with(
    p: &Polytope,
    h_grid: &[f64],
    steps: usize,
    seed: u64,
    base: &WalkConfig,
) -> Result<CompareTable> {
    let n = p.n();
    let mut rng = seeded_rng(seed);
    let mut u = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
    u /= u.norm();
    let burn_in = steps / 10;
    let mut table = CompareTable {
        steps,
        burn_in,
        seed,
        direction: u.iter().copied().collect(),
        rows: Vec::new(),
    };
    if steps == 0 {
        return Ok(table);
    }
    let tol = base.tolerances;
    let center = analytic_center(p, None, &tol)?;
    let project = |xs: &[DVector<f64>]| -> Vec<f64> { xs.iter().map(|x| x.dot(&u)).collect() };
    for (k, &h) in h_grid.iter().enumerate() {
        let row_seed = seed.wrapping_add(1 + k as u64);

        let mut cfg = base.clone();
        cfg.step_size = h;
        cfg.seed = row_seed;
        cfg.burn_in = Some(burn_in);
        cfg.thin = 1;
        let chain = run_chain_with_rng(p, center.x(), steps, &cfg, &mut seeded_rng(row_seed))?;

        let r = (n as f64 * h).sqrt();
        let mut drng = seeded_rng(row_seed ^ 0x9e37_79b9_7f4a_7c15);
        let (warm, _) = run_dikin_chain(p, center.x(), burn_in, r, &tol, &mut drng)?;
        let start = warm.last().unwrap_or(center.x());
        let (dikin, dikin_accept) = run_dikin_chain(p, start, steps, r, &tol, &mut drng)?;

        table.rows.push(CompareRow {
            h,
            geodesic_accept: chain.stats.accept_rate,
            geodesic_iat: integrated_autocorrelation_time(&project(&chain.samples)),
            dikin_r: r,
            dikin_accept,
            dikin_iat: integrated_autocorrelation_time(&project(&dikin)),
        });
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_steps_empty_table() {
        let p = Polytope::hypercube(2).unwrap();
        let t = compare_walks(&p, &[0.1, 0.2], 0, 1).unwrap();
        assert!(t.rows.is_empty());
        assert_eq!(t.to_csv(), format!("{}\n", CompareTable::CSV_HEADER));
    }

    #[test]
    fn same_seed_same_table() {
        let p = Polytope::hypercube(2).unwrap();
        let a = compare_walks(&p, &[0.05], 50, 9).unwrap();
        let b = compare_walks(&p, &[0.05], 50, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 1);
    }
}
