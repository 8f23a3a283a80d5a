//! The Metropolis-filtered geodesic walk and a Dikin-walk baseline.
//!
//! Internally a proposal is the geodesic `γ` on `[0, ℓ]`, `ℓ = √(nh)`, with
//! `γ'(0) = w/√n + ½√(h/n)·μ(x)`. Densities use the unscaled velocity
//! `v_x = ℓ·γ'(0)`; [`unscaled_velocity`] and [`rescaled_velocity`] are the
//! only places that convert between the two.

mod chain;
mod density;
mod dikin;
mod geodesic;

pub use chain::{
    filter, geodesic_length, metropolis_step, propose, propose_with_direction,
    propose_with_velocity, quantile_sorted, rescaled_velocity, run_chain, run_chain_with_rng,
    sample_gaussian_direction, seeded_rng, unscaled_velocity, Chain, ChainStats, FailCounts,
    FailReason, GeodesicSpec, Histogram, Quantiles, WalkRng, WalkStep,
};
pub use density::{formula_log_ratio, transition_log_density};
pub use dikin::{dikin_walk_step, run_dikin_chain};
pub use geodesic::{
    jacobi_logdet, solve_geodesic, transport_frame, FrameTransport, GeodesicPath,
    GeodesicSegment, CURVE_SAMPLES,
};
