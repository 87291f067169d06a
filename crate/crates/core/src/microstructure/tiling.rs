use std::collections::{HashMap, VecDeque};

use nalgebra::{Matrix3, Vector3};

use super::lattice::{CellId, PeriodicLaminate};
use super::target::{DiagonalTarget, LaminateBasis, LaminateCase};
use super::MicrostructureError;
use crate::qtensor::{QTensor, SymTensor3};

/// Axis-aligned box, expressed in the eigenframe of the target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxDomain {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl BoxDomain {
    pub fn new(min: [f64; 3], max: [f64; 3]) -> Result<Self, MicrostructureError> {
        if (0..3).any(|i| !(min[i].is_finite() && max[i].is_finite() && max[i] > min[i])) {
            return Err(MicrostructureError::InvalidBox);
        }
        Ok(Self { min, max })
    }

    pub fn cube(half: f64) -> Result<Self, MicrostructureError> {
        Self::new([-half; 3], [half; 3])
    }

    pub fn volume(&self) -> f64 {
        (0..3).map(|i| self.max[i] - self.min[i]).product()
    }

    pub fn contains(&self, x: [f64; 3], tol: f64) -> bool {
        (0..3).all(|i| x[i] >= self.min[i] - tol && x[i] <= self.max[i] + tol)
    }

    pub fn diameter(&self) -> f64 {
        (0..3).map(|i| (self.max[i] - self.min[i]).powi(2)).sum::<f64>().sqrt()
    }
}

/// One clipped cell. The cross-section lives in the `(z1, z3)` plane and is
/// extruded over the full `z2` range of the box.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub id: CellId,
    pub polygon: Vec<[f64; 2]>,
    pub area: f64,
    pub volume: f64,
    pub centroid: [f64; 3],
}

/// A shared facet between two cells. `normal` points from the first cell
/// into the second; `segment` holds the end points of the shared edge at
/// mid-height in `z2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Interface {
    pub cells: (usize, usize),
    pub normal: [f64; 3],
    pub segment: [[f64; 3]; 2],
}

impl Interface {
    pub fn midpoint(&self) -> [f64; 3] {
        let [a, b] = self.segment;
        [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0, (a[2] + b[2]) / 2.0]
    }

    /// End points and midpoint.
    pub fn sample_points(&self) -> [[f64; 3]; 3] {
        [self.segment[0], self.midpoint(), self.segment[1]]
    }
}

#[derive(Debug, Clone)]
pub struct Tiling {
    pub n: usize,
    pub domain: BoxDomain,
    pub cells: Vec<Cell>,
    pub interfaces: Vec<Interface>,
    laminate: PeriodicLaminate,
    index: HashMap<CellId, usize>,
}

fn polygon_area(p: &[[f64; 2]]) -> f64 {
    let mut s = 0.0;
    for i in 0..p.len() {
        let (a, b) = (p[i], p[(i + 1) % p.len()]);
        s += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * s
}

fn polygon_centroid(p: &[[f64; 2]]) -> [f64; 2] {
    let (mut cx, mut cy, mut s) = (0.0, 0.0, 0.0);
    for i in 0..p.len() {
        let (a, b) = (p[i], p[(i + 1) % p.len()]);
        let w = a[0] * b[1] - b[0] * a[1];
        cx += (a[0] + b[0]) * w;
        cy += (a[1] + b[1]) * w;
        s += w;
    }
    if s.abs() < 1e-300 {
        return p[0];
    }
    [cx / (3.0 * s), cy / (3.0 * s)]
}

/// Sutherland-Hodgman clip against the rectangle `[lo, hi]`.
pub(crate) fn clip_to_rect(poly: &[[f64; 2]], lo: [f64; 2], hi: [f64; 2]) -> Vec<[f64; 2]> {
    let mut out = poly.to_vec();
    for axis in 0..2 {
        for (bound, keep_above) in [(lo[axis], true), (hi[axis], false)] {
            if out.is_empty() {
                return out;
            }
            let inside = |p: &[f64; 2]| if keep_above { p[axis] >= bound } else { p[axis] <= bound };
            let input = std::mem::take(&mut out);
            for i in 0..input.len() {
                let cur = input[i];
                let prev = input[(i + input.len() - 1) % input.len()];
                let (ci, pi) = (inside(&cur), inside(&prev));
                if ci != pi {
                    let t = (bound - prev[axis]) / (cur[axis] - prev[axis]);
                    let mut x = [prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1])];
                    x[axis] = bound;
                    out.push(x);
                }
                if ci {
                    out.push(cur);
                }
            }
        }
    }
    out
}

pub fn build_tiling(
    target: &DiagonalTarget,
    basis: &LaminateBasis,
    n: usize,
    domain: &BoxDomain,
) -> Result<Tiling, MicrostructureError> {
    if n == 0 {
        return Err(MicrostructureError::InvalidFrequency);
    }
    let mut basis = basis.clone();
    basis.target = *target;
    let laminate = PeriodicLaminate::new(basis);
    let nf = n as f64;
    let lo = [domain.min[0] * nf, domain.min[2] * nf];
    let hi = [domain.max[0] * nf, domain.max[2] * nf];
    let rect_area = (hi[0] - lo[0]) * (hi[1] - lo[1]);
    let depth = domain.max[1] - domain.min[1];
    let z2_mid = 0.5 * (domain.min[1] + domain.max[1]);

    let mut polys: Vec<(CellId, Vec<[f64; 2]>)> = Vec::new();
    match laminate.case() {
        LaminateCase::Generic => {
            let t = laminate.basis().period.unwrap_or(1.0);
            let k3a = ((lo[1] + 1.0) / 2.0).floor() as i64 - 1;
            let k3b = ((hi[1] + 1.0) / 2.0).floor() as i64 + 1;
            let k1a = ((lo[0] - 2.0 * t) / (2.0 * t)).floor() as i64 - 1;
            let k1b = ((hi[0] + 2.0 * t) / (2.0 * t)).ceil() as i64 + 1;
            for k3 in k3a..=k3b {
                for k1 in k1a..=k1b {
                    for kind in 1..=4 {
                        let id = CellId { kind, k1, k3 };
                        let quad = laminate.rhomboid(id).expect("generic cell");
                        polys.push((id, clip_to_rect(&quad, lo, hi)));
                    }
                }
            }
        }
        LaminateCase::Degenerate => {
            let k3a = ((lo[1] + 2.0) / 4.0).floor() as i64 - 1;
            let k3b = ((hi[1] + 2.0) / 4.0).floor() as i64 + 1;
            for k3 in k3a..=k3b {
                for kind in 1..=4 {
                    let id = CellId { kind, k1: 0, k3 };
                    let (a, b) = laminate.slab(id).expect("slab cell");
                    let rect = [[lo[0], a], [hi[0], a], [hi[0], b], [lo[0], b]];
                    polys.push((id, clip_to_rect(&rect, lo, hi)));
                }
            }
        }
    }

    let mut cells = Vec::new();
    for (id, poly) in polys {
        if poly.len() < 3 {
            continue;
        }
        let area_w = polygon_area(&poly);
        if area_w <= 1e-14 * rect_area {
            continue;
        }
        let polygon: Vec<[f64; 2]> = poly.iter().map(|p| [p[0] / nf, p[1] / nf]).collect();
        let area = area_w / (nf * nf);
        let c = polygon_centroid(&polygon);
        cells.push(Cell { id, polygon, area, volume: area * depth, centroid: [c[0], z2_mid, c[1]] });
    }
    let index: HashMap<CellId, usize> = cells.iter().enumerate().map(|(i, c)| (c.id, i)).collect();

    let scale = domain.diameter().max(1.0);
    let on_boundary = |a: [f64; 2], b: [f64; 2]| {
        let tol = 1e-12 * scale;
        (0..2).any(|ax| {
            let (l, h) = ([domain.min[0], domain.min[2]][ax], [domain.max[0], domain.max[2]][ax]);
            ((a[ax] - l).abs() <= tol && (b[ax] - l).abs() <= tol)
                || ((a[ax] - h).abs() <= tol && (b[ax] - h).abs() <= tol)
        })
    };
    let mut interfaces = Vec::new();
    for (i, cell) in cells.iter().enumerate() {
        let p = &cell.polygon;
        for e in 0..p.len() {
            let (a, b) = (p[e], p[(e + 1) % p.len()]);
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let len = dx.hypot(dy);
            if len <= 1e-13 * scale || on_boundary(a, b) {
                continue;
            }
            let nu = [dy / len, -dx / len];
            let m = [(a[0] + b[0]) / 2.0 * nf, (a[1] + b[1]) / 2.0 * nf];
            let step = 1e-9 * (1.0 + m[0].abs().max(m[1].abs()));
            let nb = laminate.locate(m[0] + nu[0] * step, m[1] + nu[1] * step);
            if let Some(&j) = index.get(&nb) {
                if j > i {
                    interfaces.push(Interface {
                        cells: (i, j),
                        normal: [nu[0], 0.0, nu[1]],
                        segment: [[a[0], z2_mid, a[1]], [b[0], z2_mid, b[1]]],
                    });
                }
            }
        }
    }
    Ok(Tiling { n, domain: *domain, cells, interfaces, laminate, index })
}

impl Tiling {
    pub fn laminate(&self) -> &PeriodicLaminate {
        &self.laminate
    }

    pub fn cell_index(&self, id: &CellId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn total_volume(&self) -> f64 {
        self.cells.iter().map(|c| c.volume).sum()
    }

    /// Index of the cell containing `x`. Points within `1e-12` of an
    /// interface resolve to the adjacent cell of lowest type.
    pub fn locate(&self, x: [f64; 3]) -> Result<usize, MicrostructureError> {
        let scale = self.domain.diameter().max(1.0);
        if !self.domain.contains(x, 1e-12 * scale) {
            return Err(MicrostructureError::OutOfDomain { point: x });
        }
        let nf = self.n as f64;
        let h = 1e-12 * scale;
        let mut best: Option<(usize, usize)> = None;
        for (d1, d3) in [(0.0, 0.0), (h, h), (h, -h), (-h, h), (-h, -h)] {
            let (z1, z3) = (x[0] + d1, x[2] + d3);
            let id = self.laminate.locate(z1 * nf, z3 * nf);
            if let Some(&i) = self.index.get(&id) {
                if best.map_or(true, |(k, _)| id.kind < k) {
                    best = Some((id.kind, i));
                }
            }
        }
        best.map(|(_, i)| i).ok_or(MicrostructureError::OutOfDomain { point: x })
    }

    pub fn gradient(&self, cell: usize) -> &Matrix3<f64> {
        self.laminate.gradient(self.cells[cell].id.kind)
    }

    /// Volume-weighted mean of `Q_n` over the whole box.
    pub fn mean_q(&self) -> SymTensor3 {
        let mut acc = SymTensor3::ZERO;
        for c in &self.cells {
            acc = acc + *self.laminate.q(c.id.kind) * c.volume;
        }
        acc * (1.0 / self.total_volume())
    }
}

/// Piecewise-constant `Q_n` at `x` (eigenframe coordinates).
pub fn sample_qn(x: [f64; 3], tiling: &Tiling, basis: &LaminateBasis) -> Result<QTensor, MicrostructureError> {
    let i = tiling.locate(x)?;
    Ok(QTensor::from_deviatoric(basis.q(tiling.cells[i].id.kind)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HadamardReport {
    pub interfaces: usize,
    pub max_second_singular: f64,
    pub max_normal_residual: f64,
}

pub const HADAMARD_TOL: f64 = 1e-10;

pub fn check_hadamard(basis: &LaminateBasis, tiling: &Tiling) -> Result<HadamardReport, MicrostructureError> {
    let mut rep = HadamardReport { interfaces: tiling.interfaces.len(), max_second_singular: 0.0, max_normal_residual: 0.0 };
    for f in &tiling.interfaces {
        let (i, j) = f.cells;
        let d = basis.gradient(tiling.cells[i].id.kind) - basis.gradient(tiling.cells[j].id.kind);
        let mut s: Vec<f64> = d.singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        let nu = Vector3::from(f.normal);
        let resid = (d - (d * nu) * nu.transpose()).norm();
        rep.max_second_singular = rep.max_second_singular.max(s[1]);
        rep.max_normal_residual = rep.max_normal_residual.max(resid);
        if s[1] > HADAMARD_TOL || resid > HADAMARD_TOL {
            return Err(MicrostructureError::IncompatiblePair { cells: (i, j), residual: s[1].max(resid) });
        }
    }
    Ok(rep)
}

/// `f_n(z) = G_j z + b` on every cell of a tiling.
#[derive(Debug, Clone)]
pub struct PwAffineMap {
    tiling: Tiling,
    pub offsets: Vec<Vector3<f64>>,
    pub q: Matrix3<f64>,
}

pub fn build_fn(basis: &LaminateBasis, tiling: &Tiling) -> Result<PwAffineMap, MicrostructureError> {
    let _ = check_hadamard(basis, tiling)?;
    let nc = tiling.cells.len();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nc];
    for (k, f) in tiling.interfaces.iter().enumerate() {
        adj[f.cells.0].push((f.cells.1, k));
        adj[f.cells.1].push((f.cells.0, k));
    }
    let nf = tiling.n as f64;
    let lam = tiling.laminate();
    let mut offsets: Vec<Option<Vector3<f64>>> = vec![None; nc];
    for start in 0..nc {
        if offsets[start].is_some() {
            continue;
        }
        offsets[start] = Some(lam.offset(tiling.cells[start].id) / nf);
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let bi = offsets[i].expect("visited");
            for &(j, k) in &adj[i] {
                if offsets[j].is_none() {
                    let p = Vector3::from(tiling.interfaces[k].midpoint());
                    let bj = bi + (tiling.gradient(i) - tiling.gradient(j)) * p;
                    offsets[j] = Some(bj);
                    queue.push_back(j);
                }
            }
        }
    }
    let offsets: Vec<Vector3<f64>> = offsets.into_iter().map(|b| b.expect("visited")).collect();
    let map = PwAffineMap { tiling: tiling.clone(), offsets, q: basis.target.diagonal().to_matrix() };
    let mismatch = map.max_interface_jump();
    if mismatch > 1e-10 {
        return Err(MicrostructureError::InconsistentLoop { mismatch });
    }
    Ok(map)
}

impl PwAffineMap {
    pub fn tiling(&self) -> &Tiling {
        &self.tiling
    }

    pub fn eval_cell(&self, cell: usize, z: &Vector3<f64>) -> Vector3<f64> {
        self.tiling.gradient(cell) * z + self.offsets[cell]
    }

    pub fn eval(&self, z: [f64; 3]) -> Result<Vector3<f64>, MicrostructureError> {
        let i = self.tiling.locate(z)?;
        Ok(self.eval_cell(i, &Vector3::from(z)))
    }

    /// Largest jump of `f_n` over interface end points and midpoints, relative
    /// to `max(1, |z|)`.
    pub fn max_interface_jump(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for f in &self.tiling.interfaces {
            for p in f.sample_points() {
                let z = Vector3::from(p);
                let d = (self.eval_cell(f.cells.0, &z) - self.eval_cell(f.cells.1, &z)).norm();
                worst = worst.max(d / z.norm().max(1.0));
            }
        }
        worst
    }

    /// `sup |f_n(z) - Q z|`, attained at cell vertices since the deviation is
    /// affine per cell and independent of `z2`.
    pub fn sup_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, c) in self.tiling.cells.iter().enumerate() {
            for v in &c.polygon {
                let z = Vector3::new(v[0], 0.0, v[1]);
                worst = worst.max((self.eval_cell(i, &z) - self.q * z).norm());
            }
        }
        worst
    }

    /// Largest distance between the propagated offsets and the closed form
    /// `(Q - G_j) P_k / n`.
    pub fn analytic_offset_error(&self) -> f64 {
        let nf = self.tiling.n as f64;
        let lam = self.tiling.laminate();
        self.tiling
            .cells
            .iter()
            .zip(&self.offsets)
            .map(|(c, b)| (lam.offset(c.id) / nf - b).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakRow {
    pub n: usize,
    pub error: f64,
}

/// Frobenius distance between the window average of `Q_n` and the target, per `n`.
/// The window is given in eigenframe coordinates.
pub fn weak_convergence_report(
    target: &QTensor,
    ns: &[usize],
    window: &BoxDomain,
) -> Result<Vec<WeakRow>, MicrostructureError> {
    let t = super::diagonalize_target(target)?;
    let basis = super::build_laminate_basis(&t);
    let q = t.diagonal();
    ns.iter()
        .map(|&n| {
            let tiling = build_tiling(&t, &basis, n, window)?;
            Ok(WeakRow { n, error: (tiling.mean_q() - q).frob_norm() })
        })
        .collect()
}
