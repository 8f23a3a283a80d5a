//! Reference oracles, uniformity statistics and walk comparisons.

mod compare;
mod oned;
mod oracles;
mod quadrature;
mod uniformity;

pub use compare::{compare_walks, compare_walks_with, CompareRow, CompareTable};
pub use oned::{oned_geodesic, oned_transition_density, oned_transition_log_density, OneDimBarrier};
pub use oracles::{
    christoffel_index_sum, dense_drift, dense_leverage, dense_metric, dense_projection,
    drift_finite_difference, hilbert_distance_bisection, log_det_eigen, ricci_index_sum,
    riemann_index_sum, third_derivative,
};
pub use quadrature::{gauss_legendre, integrate_adaptive, integrate_gauss};
pub use uniformity::{
    effective_sample_size, exact_moments, integrated_autocorrelation_time, ks_p_value,
    ks_statistic, rejection_samples, uniformity_report, CoordinateSummary, ProjectionTest,
    UniformityReport, KS_ALPHA, MIN_SAMPLES, PROJECTIONS,
};
