//! Membrane-on-nematic-foundation limit model.
//!
//! * [`qtensor`]: order tensors, spectral sets and projections.
//! * [`effective`]: pointwise densities of the limit energy.
//! * [`fem`]: P1 minimization of the limit energy on a rectangle.
//! * [`microstructure`]: uniaxial laminates averaging to a biaxial target.
//! * [`energy3d`]: rescaled three-dimensional energy and recovery sequences.

pub mod effective;
pub mod energy3d;
pub mod fem;
pub mod microstructure;
pub mod qtensor;
