//! Pointwise densities of the limit membrane energy.

use crate::qtensor::{
    dist2_weighted, project_QB_weighted, project_QB_weighted_with, weighted_norm_sq,
    MaterialParams, QTensor, QTensorError, SymTensor3, WeightedSolver, PROJECTION_TOL,
};

/// Symmetric in-plane strain `e_ab(u)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlanarStrain {
    pub e11: f64,
    pub e22: f64,
    pub e12: f64,
}

impl PlanarStrain {
    pub const fn new(e11: f64, e22: f64, e12: f64) -> Self {
        Self { e11, e22, e12 }
    }

    /// Symmetric part of a planar displacement gradient `[[d1u1, d2u1], [d1u2, d2u2]]`.
    pub fn from_gradient(g: [[f64; 2]; 2]) -> Self {
        Self::new(g[0][0], g[1][1], 0.5 * (g[0][1] + g[1][0]))
    }

    pub fn trace(&self) -> f64 {
        self.e11 + self.e22
    }

    pub fn frob_norm_sq(&self) -> f64 {
        self.e11 * self.e11 + self.e22 * self.e22 + 2.0 * self.e12 * self.e12
    }
}

/// Out-of-plane shear matrix with `A_13 = u1/2`, `A_23 = u2/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearMatrix(SymTensor3);

impl ShearMatrix {
    pub fn sym(&self) -> &SymTensor3 {
        &self.0
    }
}

pub fn shear_matrix(u: [f64; 2]) -> ShearMatrix {
    ShearMatrix(SymTensor3::new(0.0, 0.0, 0.0, 0.0, 0.5 * u[0], 0.5 * u[1]))
}

/// Radius of the zero-energy disc of shears.
pub const PLATEAU_RADIUS: f64 = 2.0 / 3.0;

/// `t^2 + lambda/(2mu) (s + t)^2`.
pub fn film_k33_objective(t: f64, s: f64, m: &MaterialParams) -> f64 {
    t * t + m.trace_coeff() * (s + t) * (s + t)
}

/// `(t - q33)^2 + lambda/(2mu) t^2`.
pub fn nematic_k33_objective(t: f64, q33: f64, m: &MaterialParams) -> f64 {
    (t - q33) * (t - q33) + m.trace_coeff() * t * t
}

pub fn optimal_k33_film(s: f64, m: &MaterialParams) -> f64 {
    -m.weight33() * s
}

pub fn optimal_k33_nematic(q33: f64, m: &MaterialParams) -> f64 {
    2.0 * m.mu() / (m.lambda() + 2.0 * m.mu()) * q33
}

/// `lambda/(lambda+2mu) (e11+e22)^2 + |e|_F^2`.
pub fn film_density(e: &PlanarStrain, m: &MaterialParams) -> f64 {
    m.weight33() * e.trace().powi(2) + e.frob_norm_sq()
}

pub fn foundation_density(u: [f64; 2], m: &MaterialParams) -> Result<f64, QTensorError> {
    dist2_weighted(shear_matrix(u).sym(), m)
}

#[allow(non_snake_case)]
pub fn optimal_Qbar(u: [f64; 2], m: &MaterialParams) -> Result<QTensor, QTensorError> {
    project_QB_weighted(shear_matrix(u).sym(), m, PROJECTION_TOL)
}

pub fn e0_density(e: &PlanarStrain, u: [f64; 2], m: &MaterialParams) -> Result<f64, QTensorError> {
    Ok(0.5 * (film_density(e, m) + foundation_density(u, m)?))
}

/// Half the foundation density and its gradient in `u`, for assembly loops.
///
/// The gradient of `dist^2/2` is `(A - P(A))_{a3}` with `P` the weighted
/// projection; inside the plateau both vanish exactly.
pub fn half_foundation_with_gradient(
    u: [f64; 2],
    m: &MaterialParams,
    tol: f64,
) -> Result<(f64, [f64; 2]), QTensorError> {
    if u[0].hypot(u[1]) <= PLATEAU_RADIUS {
        return Ok((0.0, [0.0, 0.0]));
    }
    let a = *shear_matrix(u).sym();
    let q = project_QB_weighted_with(&a, m, tol, WeightedSolver::ScalarMultiplier)?;
    let d = a - *q.sym();
    Ok((0.5 * weighted_norm_sq(&d, m), [d.a13, d.a23]))
}
