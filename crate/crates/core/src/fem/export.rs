use std::fmt::Write as _;
use std::path::Path;

use super::assembly::element_strain;
use super::{FemError, Mesh2D, PlanarField};
use crate::effective::{film_density, foundation_density};
use crate::qtensor::MaterialParams;

pub const SOLUTION_CSV_HEADER: &str = "x,y,u1,u2,foundation_density,film_density";

/// Nodal CSV: the film density at a node is the mean over incident elements.
pub fn solution_csv(field: &PlanarField, mesh: &Mesh2D, material: &MaterialParams) -> Result<String, FemError> {
    field.check(mesh)?;
    let mut film = vec![0.0; mesh.node_count()];
    let mut count = vec![0usize; mesh.node_count()];
    for e in 0..mesh.triangles.len() {
        let d = film_density(&element_strain(mesh, e, field), material);
        for &n in &mesh.triangles[e] {
            film[n] += d;
            count[n] += 1;
        }
    }
    let mut out = String::from(SOLUTION_CSV_HEADER);
    out.push('\n');
    for (k, p) in mesh.nodes.iter().enumerate() {
        let u = field.node(k);
        let f = foundation_density(u, material)?;
        let fd = film[k] / count[k].max(1) as f64;
        let _ = writeln!(out, "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}", p[0], p[1], u[0], u[1], f, fd);
    }
    Ok(out)
}

pub fn export_solution(
    field: &PlanarField,
    mesh: &Mesh2D,
    material: &MaterialParams,
    path: &Path,
) -> Result<(), FemError> {
    let csv = solution_csv(field, mesh, material)?;
    std::fs::write(path, csv).map_err(|source| FemError::Io { path: path.display().to_string(), source })
}
