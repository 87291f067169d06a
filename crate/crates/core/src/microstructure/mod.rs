//! Explicit laminate microstructure: four rank-one compatible gradients with
//! uniaxial symmetric parts averaging to a biaxial target, their periodic
//! tilings, the continuous piecewise-affine maps `f_n`, and a smoothed
//! director field.
//!
//! All geometry lives in the eigenframe of the target, where it reads
//! `diag(a, b, c)` with `a <= b <= c`. Cells are invariant in the second
//! coordinate, so tilings are stored as polygons in the `(z1, z3)` plane.

mod lattice;
mod mollify;
mod target;
mod tiling;

use thiserror::Error;

use crate::qtensor::QTensorError;

pub use lattice::{CellId, Facet, PeriodicLaminate};
pub use mollify::{mollify_field, LayeredDirector, MollifiedField, JUNCTION_FADE};
pub use target::{
    build_laminate_basis, diagonalize_target, lamination_period, DiagonalTarget, LaminateBasis, LaminateCase,
    DEGENERATE_GAP,
};
pub use tiling::{
    build_fn, build_tiling, check_hadamard, sample_qn, weak_convergence_report, BoxDomain, Cell, HadamardReport,
    Interface, PwAffineMap, Tiling, WeakRow, HADAMARD_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MicrostructureError {
    #[error("target is not biaxial (eigenvalues {eigenvalues:?})")]
    NotBiaxial { eigenvalues: [f64; 3] },
    #[error("a = {a} is at -1/3; use the slab construction")]
    DegenerateCase { a: f64 },
    #[error("frequency must be at least 1")]
    InvalidFrequency,
    #[error("box must have finite, positive extent")]
    InvalidBox,
    #[error("cells {cells:?} are not rank-one compatible (residual {residual:e})")]
    IncompatiblePair { cells: (usize, usize), residual: f64 },
    #[error("offset propagation is inconsistent (jump {mismatch:e})")]
    InconsistentLoop { mismatch: f64 },
    #[error("point {point:?} is outside the box")]
    OutOfDomain { point: [f64; 3] },
    #[error("delta = {delta} exceeds the admissible {limit}")]
    DeltaTooLarge { delta: f64, limit: f64 },
    #[error(transparent)]
    QTensor(#[from] QTensorError),
}
