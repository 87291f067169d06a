use std::sync::Arc;

use nalgebra::DVector;
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix};

use super::assembly::{element_mass, element_stiffness, energy_and_gradient_with, VectorFn};
use super::{FemError, FemOptions, LoadSpec, Mesh2D, PlanarField};
use crate::qtensor::MaterialParams;

#[derive(Clone, Default)]
pub enum EdgeCondition {
    #[default]
    Free,
    Dirichlet(VectorFn),
}

impl EdgeCondition {
    pub fn dirichlet(g: impl Fn([f64; 2]) -> [f64; 2] + Send + Sync + 'static) -> Self {
        Self::Dirichlet(Arc::new(g))
    }

    pub fn constant(v: [f64; 2]) -> Self {
        Self::dirichlet(move |_| v)
    }
}

impl std::fmt::Debug for EdgeCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Free => write!(f, "Free"),
            Self::Dirichlet(_) => write!(f, "Dirichlet(<fn>)"),
        }
    }
}

/// Conditions on the four sides of the rectangle.
#[derive(Debug, Clone, Default)]
pub struct BoundarySpec {
    pub left: EdgeCondition,
    pub right: EdgeCondition,
    pub bottom: EdgeCondition,
    pub top: EdgeCondition,
}

impl BoundarySpec {
    pub fn free() -> Self {
        Self::default()
    }

    pub fn all(cond: EdgeCondition) -> Self {
        Self { left: cond.clone(), right: cond.clone(), bottom: cond.clone(), top: cond }
    }

    /// Fixed nodal values; corners take the first Dirichlet side in the order
    /// left, right, bottom, top.
    pub fn fixed_values(&self, mesh: &Mesh2D) -> Vec<Option<[f64; 2]>> {
        mesh.nodes
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let (i, j) = mesh.grid_index(k);
                let sides = [
                    (i == 0, &self.left),
                    (i == mesh.nx, &self.right),
                    (j == 0, &self.bottom),
                    (j == mesh.ny, &self.top),
                ];
                sides.iter().find_map(|(on, c)| match (on, c) {
                    (true, EdgeCondition::Dirichlet(g)) => Some(g(*p)),
                    _ => None,
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub fem: FemOptions,
    pub max_iters: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { fem: FemOptions::default(), max_iters: 20_000 }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub field: PlanarField,
    pub energy: f64,
    pub iterations: usize,
    /// `sqrt(g^T P^{-1} g)` at the returned field, free dofs only.
    pub residual: f64,
    pub restarts: usize,
    /// Energy after every accepted iterate, starting with the initial guess.
    pub energy_history: Vec<f64>,
}

struct Preconditioner {
    free: Vec<usize>,
    chol: CscCholesky<f64>,
}

impl Preconditioner {
    fn build(mesh: &Mesh2D, m: &MaterialParams, free: Vec<usize>, mass_shift: f64) -> Result<Self, FemError> {
        let ndof = mesh.dof_count();
        let mut local = vec![usize::MAX; ndof];
        for (k, &d) in free.iter().enumerate() {
            local[d] = k;
        }
        let mut coo = CooMatrix::new(free.len(), free.len());
        for e in 0..mesh.triangles.len() {
            let k = element_stiffness(mesh, e, m);
            let mm = element_mass(mesh, e);
            let t = mesh.triangles[e];
            let dof = |a: usize| 2 * t[a / 2] + a % 2;
            for a in 0..6 {
                let ra = local[dof(a)];
                if ra == usize::MAX {
                    continue;
                }
                for b in 0..6 {
                    let cb = local[dof(b)];
                    if cb == usize::MAX {
                        continue;
                    }
                    let v = k[a][b] + mass_shift * mm[a][b];
                    if v != 0.0 {
                        coo.push(ra, cb, v);
                    }
                }
            }
        }
        let csc = CscMatrix::from(&coo);
        let chol = CscCholesky::factor(&csc).map_err(|_| FemError::SingularSystem)?;
        Ok(Self { free, chol })
    }

    fn restrict(&self, g: &PlanarField) -> DVector<f64> {
        DVector::from_iterator(self.free.len(), self.free.iter().map(|&d| g.values[d]))
    }

    fn apply(&self, g: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(g).column(0).into_owned()
    }
}

/// Minimizes the discrete limit energy with default options.
pub fn solve(
    mesh: &Mesh2D,
    material: &MaterialParams,
    boundary: &BoundarySpec,
    load: &LoadSpec,
    tol: f64,
) -> Result<PlanarField, FemError> {
    solve_with(mesh, material, boundary, load, tol, &SolverOptions::default(), None).map(|r| r.field)
}

/// Accelerated preconditioned gradient descent with function-value restart.
///
/// The preconditioner `K + M/2` (film stiffness plus half the quadrature mass)
/// majorizes the Hessian, since the foundation density is convex with
/// curvature at most one half in `u`. A plain preconditioned step therefore
/// never increases the energy; an accelerated step that does is replaced by a
/// plain one and the momentum is reset.
pub fn solve_with(
    mesh: &Mesh2D,
    material: &MaterialParams,
    boundary: &BoundarySpec,
    load: &LoadSpec,
    tol: f64,
    opts: &SolverOptions,
    initial: Option<&PlanarField>,
) -> Result<SolveReport, FemError> {
    let fixed = boundary.fixed_values(mesh);
    let any_fixed = fixed.iter().any(Option::is_some);
    if !any_fixed && (load.is_none() || !opts.fem.foundation) {
        return Err(FemError::SingularSystem);
    }
    let mut x = match initial {
        Some(f) => {
            f.check(mesh)?;
            f.clone()
        }
        None => PlanarField::zeros(mesh),
    };
    let mut free = Vec::new();
    for (k, v) in fixed.iter().enumerate() {
        match v {
            Some(g) => {
                x.values[2 * k] = g[0];
                x.values[2 * k + 1] = g[1];
            }
            None => free.extend([2 * k, 2 * k + 1]),
        }
    }
    let mass_shift = if opts.fem.foundation { 0.5 } else { 0.0 };
    let eval = |f: &PlanarField| energy_and_gradient_with(mesh, f, material, load, &opts.fem);

    if free.is_empty() {
        let (energy, _) = eval(&x)?;
        return Ok(SolveReport { field: x, energy, iterations: 0, residual: 0.0, restarts: 0, energy_history: vec![energy] });
    }
    let pc = Preconditioner::build(mesh, material, free, mass_shift)?;
    let step_from = |base: &PlanarField, dir: &DVector<f64>, scale: f64| {
        let mut out = base.clone();
        for (k, &d) in pc.free.iter().enumerate() {
            out.values[d] += scale * dir[k];
        }
        out
    };

    let (mut energy, g) = eval(&x)?;
    let mut gr = pc.restrict(&g);
    let mut pg = pc.apply(&gr);
    let mut residual = gr.dot(&pg).max(0.0).sqrt();
    let mut history = vec![energy];
    let mut x_prev = x.clone();
    let mut t = 1.0_f64;
    let mut restarts = 0;
    let mut iterations = 0;
    while residual > tol {
        if iterations >= opts.max_iters {
            return Err(FemError::NoConvergence { iterations, residual });
        }
        iterations += 1;
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        let mut candidate = None;
        if beta > 0.0 {
            let mut y = x.clone();
            for &d in &pc.free {
                y.values[d] += beta * (x.values[d] - x_prev.values[d]);
            }
            let (_, gy) = eval(&y)?;
            let py = pc.apply(&pc.restrict(&gy));
            let xn = step_from(&y, &py, -1.0);
            let (en, gn) = eval(&xn)?;
            if en <= energy {
                candidate = Some((xn, en, gn));
                t = t_next;
            }
        }
        let (xn, en, gn) = match candidate {
            Some(c) => c,
            None => {
                if beta > 0.0 {
                    restarts += 1;
                }
                t = 1.0;
                let xn = step_from(&x, &pg, -1.0);
                let (en, gn) = eval(&xn)?;
                (xn, en, gn)
            }
        };
        x_prev = std::mem::replace(&mut x, xn);
        energy = en;
        history.push(energy);
        gr = pc.restrict(&gn);
        pg = pc.apply(&gr);
        residual = gr.dot(&pg).max(0.0).sqrt();
    }
    Ok(SolveReport { field: x, energy, iterations, residual, restarts, energy_history: history })
}
