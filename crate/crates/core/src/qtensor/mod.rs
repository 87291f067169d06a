//! Symmetric 3x3 tensors, the biaxial and uniaxial order-tensor sets and
//! projections onto them.
//!
//! The biaxial set is `{Q symmetric, tr Q = 0, -1/3 <= eig(Q) <= 2/3}`; its
//! extreme points are the uniaxial tensors `n n^T - I/3`. The Euclidean
//! projection is spectral (project the eigenvalues, keep the frame). The
//! weighted projection uses the metric that down-weights the `33` entry by
//! `lambda/(lambda+2mu)` and is solved iteratively on top of the Euclidean one.

mod director;
mod eig;
mod projection;
mod tensor;

use thiserror::Error;

pub use director::{from_director, lift_director, slerp_director, Director};
pub use eig::{eig_sym3, reassemble, EigenDecomp};
pub use projection::{
    dist2_weighted, dist2_weighted_with, is_biaxial, is_uniaxial, project_QB_euclidean,
    project_QB_weighted, project_QB_weighted_with, project_eigenvalues_polytope,
    weighted_norm_sq, weighted_optimality_residual, WeightedSolver, LAMBDA_MAX, LAMBDA_MIN,
    MEMBERSHIP_TOL, PG_MAX_ITERS, PROJECTION_TOL,
};
pub use tensor::{MaterialParams, QTensor, SymTensor3, TRACE_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QTensorError {
    #[error("tensor is not traceless (trace = {trace:e})")]
    NotTraceless { trace: f64 },
    #[error("tensor is not uniaxial (eigenvalues {eigenvalues:?})")]
    NotUniaxial { eigenvalues: [f64; 3] },
    #[error("weighted projection did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("invalid material: {0}")]
    InvalidMaterial(String),
    #[error("director must be a nonzero finite vector")]
    ZeroDirector,
    #[error("non-finite tensor entries")]
    NonFinite,
}
