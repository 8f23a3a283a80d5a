//! Uniform sampling from polytopes `{x : Ax > b}` with the geodesic walk on
//! the log-barrier Hessian manifold.
//!
//! Geodesics, parallel transport and Jacobi fields are all integrated with a
//! Chebyshev-node collocation solver ([`collocation`]). The [`walk`] module
//! builds Metropolis-filtered chains on top of it, [`diagnostics`] holds
//! oracles and statistical checks, and [`physarum`] reuses the ODE solver
//! for a small LP demo.

pub mod center;
pub mod collocation;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod io;
pub mod physarum;
pub mod point;
pub mod polytope;
pub mod walk;

pub use center::{analytic_center, bounding_box, phase_one};
pub use collocation::{
    chebyshev_nodes, collocation_first_order, collocation_multistep, collocation_second_order,
    lagrange_integral_matrix, PiecewiseCurve, PolyCurve,
};
pub use config::{CollocationConfig, NormKind, Tolerances, WalkConfig};
pub use error::{Error, Result};
pub use diagnostics::{compare_walks, uniformity_report, OneDimBarrier, UniformityReport};
pub use geometry::{
    auxiliary_v, christoffel_action, frame_curvature_matrix, geodesic_rhs, hilbert_distance,
    parallel_transport_rhs, ricci, riemann_inner, CurvatureOperator,
};
pub use physarum::{physarum_rhs, physarum_solve, PhysarumProblem, PhysarumSolution};
pub use point::{make_point, ManifoldPoint};
pub use polytope::{Polytope, PolytopeDoc};
pub use walk::{
    dikin_walk_step, metropolis_step, propose, run_chain, sample_gaussian_direction, ChainStats,
    WalkStep,
};

pub use nalgebra::{DMatrix, DVector};
