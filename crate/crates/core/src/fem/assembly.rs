use std::sync::Arc;

use rayon::prelude::*;

use super::{FemError, Mesh2D, PlanarField};
use crate::effective::{film_density, half_foundation_with_gradient, PlanarStrain};
use crate::qtensor::MaterialParams;

pub type VectorFn = Arc<dyn Fn([f64; 2]) -> [f64; 2] + Send + Sync>;

/// Optional body force; its work is subtracted from the energy.
#[derive(Clone, Default)]
pub struct LoadSpec {
    pub force: Option<VectorFn>,
}

impl LoadSpec {
    pub fn none() -> Self {
        Self { force: None }
    }

    pub fn body_force(f: impl Fn([f64; 2]) -> [f64; 2] + Send + Sync + 'static) -> Self {
        Self { force: Some(Arc::new(f)) }
    }

    pub fn is_none(&self) -> bool {
        self.force.is_none()
    }
}

impl std::fmt::Debug for LoadSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LoadSpec").field("force", &self.force.as_ref().map(|_| "<fn>")).finish()
    }
}

/// Switches of the discrete energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FemOptions {
    /// Include the nematic foundation term (off for manufactured-solution checks).
    pub foundation: bool,
    /// Optimality tolerance of the pointwise weighted projection.
    pub projection_tol: f64,
}

impl Default for FemOptions {
    fn default() -> Self {
        Self { foundation: true, projection_tol: 1e-12 }
    }
}

pub(crate) fn element_strain(mesh: &Mesh2D, e: usize, u: &PlanarField) -> PlanarStrain {
    let g = mesh.geometry(e).grad;
    let t = mesh.triangles[e];
    let mut du = [[0.0; 2]; 2];
    for (a, &node) in t.iter().enumerate() {
        let un = u.node(node);
        for i in 0..2 {
            for j in 0..2 {
                du[i][j] += un[i] * g[a][j];
            }
        }
    }
    PlanarStrain::from_gradient(du)
}

/// Energy of one element and its gradient with respect to the six local dofs.
fn element_contribution(
    mesh: &Mesh2D,
    e: usize,
    u: &PlanarField,
    m: &MaterialParams,
    load: &LoadSpec,
    opts: &FemOptions,
) -> Result<(f64, [f64; 6]), FemError> {
    let geo = mesh.geometry(e);
    let t = mesh.triangles[e];
    let strain = element_strain(mesh, e, u);
    let r = m.weight33();
    let mut energy = 0.5 * geo.area * film_density(&strain, m);
    let mut grad = [0.0; 6];
    let tr = strain.trace();
    let em = [[strain.e11, strain.e12], [strain.e12, strain.e22]];
    for a in 0..3 {
        for i in 0..2 {
            let mut s = r * tr * geo.grad[a][i];
            for j in 0..2 {
                s += em[i][j] * geo.grad[a][j];
            }
            grad[2 * a + i] += geo.area * s;
        }
    }
    let w = geo.area / 3.0;
    for (x, p, q) in mesh.edge_midpoints(e) {
        let (up, uq) = (u.node(t[p]), u.node(t[q]));
        let um = [0.5 * (up[0] + uq[0]), 0.5 * (up[1] + uq[1])];
        if opts.foundation {
            let (f, df) = half_foundation_with_gradient(um, m, opts.projection_tol)?;
            energy += w * f;
            for i in 0..2 {
                grad[2 * p + i] += 0.5 * w * df[i];
                grad[2 * q + i] += 0.5 * w * df[i];
            }
        }
        if let Some(force) = &load.force {
            let fv = force(x);
            energy -= w * (fv[0] * um[0] + fv[1] * um[1]);
            for i in 0..2 {
                grad[2 * p + i] -= 0.5 * w * fv[i];
                grad[2 * q + i] -= 0.5 * w * fv[i];
            }
        }
    }
    Ok((energy, grad))
}

/// Energy and gradient; elements are evaluated in parallel and reduced in
/// element order so the result is bitwise reproducible.
pub fn energy_and_gradient_with(
    mesh: &Mesh2D,
    field: &PlanarField,
    material: &MaterialParams,
    load: &LoadSpec,
    opts: &FemOptions,
) -> Result<(f64, PlanarField), FemError> {
    field.check(mesh)?;
    let parts: Vec<(f64, [f64; 6])> = (0..mesh.triangles.len())
        .into_par_iter()
        .map(|e| element_contribution(mesh, e, field, material, load, opts))
        .collect::<Result<_, _>>()?;
    let mut energy = 0.0;
    let mut grad = PlanarField::zeros(mesh);
    for (e, (de, dg)) in parts.iter().enumerate() {
        energy += de;
        for (a, &node) in mesh.triangles[e].iter().enumerate() {
            grad.values[2 * node] += dg[2 * a];
            grad.values[2 * node + 1] += dg[2 * a + 1];
        }
    }
    Ok((energy, grad))
}

pub fn assemble_energy_with(
    mesh: &Mesh2D,
    field: &PlanarField,
    material: &MaterialParams,
    load: &LoadSpec,
    opts: &FemOptions,
) -> Result<f64, FemError> {
    energy_and_gradient_with(mesh, field, material, load, opts).map(|(e, _)| e)
}

/// Discrete limit energy: film term exact per element, foundation and load by
/// the edge-midpoint rule.
pub fn assemble_energy(
    mesh: &Mesh2D,
    field: &PlanarField,
    material: &MaterialParams,
    load: &LoadSpec,
) -> Result<f64, FemError> {
    assemble_energy_with(mesh, field, material, load, &FemOptions::default())
}

pub fn gradient(
    mesh: &Mesh2D,
    field: &PlanarField,
    material: &MaterialParams,
    load: &LoadSpec,
) -> Result<PlanarField, FemError> {
    energy_and_gradient_with(mesh, field, material, load, &FemOptions::default()).map(|(_, g)| g)
}

/// Film stiffness entries of one element, local dof order `(node, component)`.
pub(crate) fn element_stiffness(mesh: &Mesh2D, e: usize, m: &MaterialParams) -> [[f64; 6]; 6] {
    let geo = mesh.geometry(e);
    let r = m.weight33();
    let mut k = [[0.0; 6]; 6];
    for a in 0..3 {
        for b in 0..3 {
            let dot = geo.grad[a][0] * geo.grad[b][0] + geo.grad[a][1] * geo.grad[b][1];
            for i in 0..2 {
                for j in 0..2 {
                    let delta = if i == j { dot } else { 0.0 };
                    k[2 * a + i][2 * b + j] = geo.area
                        * (r * geo.grad[a][i] * geo.grad[b][j]
                            + 0.5 * (delta + geo.grad[a][j] * geo.grad[b][i]));
                }
            }
        }
    }
    k
}

/// Edge-midpoint mass entries (equal to the consistent P1 mass).
pub(crate) fn element_mass(mesh: &Mesh2D, e: usize) -> [[f64; 6]; 6] {
    let area = mesh.geometry(e).area;
    let mut mm = [[0.0; 6]; 6];
    for a in 0..3 {
        for b in 0..3 {
            let v = if a == b { area / 6.0 } else { area / 12.0 };
            for i in 0..2 {
                mm[2 * a + i][2 * b + i] = v;
            }
        }
    }
    mm
}
