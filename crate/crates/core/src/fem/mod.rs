//! P1 finite elements for the limit membrane energy on a rectangle.

mod assembly;
mod export;
mod mesh;
mod solver;

use thiserror::Error;

use crate::qtensor::QTensorError;

pub use assembly::{
    assemble_energy, assemble_energy_with, energy_and_gradient_with, gradient, FemOptions,
    LoadSpec, VectorFn,
};
pub use export::{export_solution, solution_csv, SOLUTION_CSV_HEADER};
pub use mesh::{ElementGeometry, Mesh2D, PlanarField};
pub use solver::{solve, solve_with, BoundarySpec, EdgeCondition, SolveReport, SolverOptions};

#[derive(Debug, Error)]
pub enum FemError {
    #[error("field has {got} dofs, mesh expects {expected}")]
    MeshMismatch { expected: usize, got: usize },
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("system is singular: no Dirichlet data and no load to fix the rigid/soft modes")]
    SingularSystem,
    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error(transparent)]
    Projection(#[from] QTensorError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
