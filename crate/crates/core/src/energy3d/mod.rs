//! Thin bilayer energy at finite thickness and its recovery sequences.
//!
//! The film occupies `omega x (0, 1)` and the nematic bonding layer
//! `omega x (-1, 0)`. Recovery displacements are assembled from smooth slow
//! profiles and, in the bonding layer, a laminate oscillating on the scale
//! `(eta eps, eta eps, eta)`. Energies are evaluated either by brute-force
//! midpoint quadrature ([`energy_i`]) or by averaging the fast variable over
//! one period first ([`periodic_cell_energy`]).

mod fields;
mod quadrature;
mod scaling;
mod strain;
mod twoscale;

use thiserror::Error;

use crate::microstructure::MicrostructureError;
use crate::qtensor::QTensorError;

pub use fields::*;
pub use quadrature::{energy_i, poincare_check, required_spacing, EnergyBreakdown, PoincareReport, Quadrature};
pub use scaling::{LadderOverrides, ScalingParams, LADDER_RATIO};
pub use strain::{
    bonding_energy_density, film_energy_density, rescaled_strain_bonding, rescaled_strain_film, RescaledStrain,
};
pub use twoscale::{
    averaged_density, cutoff_strain, film_energy, gamma_sweep, gamma_sweep_with, periodic_cell_energy, piecewise_nodes, CellEnergy,
    CellMoments, FilmLike, GrainTarget, QbarChoice, SlowState, SweepRow, SweepTable, SLOW_POINTS,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Energy3dError {
    #[error("invalid scaling: {0}")]
    InvalidScaling(String),
    #[error("grain must be a non-empty rectangle")]
    InvalidGrain,
    #[error("quadrature too coarse on axis {axis}: spacing {spacing:e} > {required:e}")]
    ResolutionTooCoarse { axis: usize, spacing: f64, required: f64 },
    #[error("cut-off width {rho} must stay below {limit}")]
    RhoTooLarge { rho: f64, limit: f64 },
    #[error(transparent)]
    Microstructure(#[from] MicrostructureError),
    #[error(transparent)]
    QTensor(#[from] QTensorError),
}
