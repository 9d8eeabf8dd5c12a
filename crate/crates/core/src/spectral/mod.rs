//! Linear finite elements for the Laplace–Beltrami operator on intrinsic
//! meshes and the lowest eigenpairs of the resulting pencil.

pub mod convergence;
pub mod operator;
pub mod solver;

pub use convergence::{convergence_study, convergence_study_with, observed_order, richardson, ConvergenceReport};
pub use operator::{
    assemble, comparison_cotangents, rayleigh_quotient, BoundaryCondition, CsrMatrix, DiscreteOperator,
};
pub use solver::{
    clusters, lowest_eigenpairs, lowest_eigenpairs_with, residual_norm, spectrum_csv, SolverOptions, SpectralResult,
    DEFAULT_SEED, DEFAULT_TOL,
};

/// Relative gap below which eigenvalues are reported as one cluster.
pub const CLUSTER_GAP: f64 = 1e-4;
