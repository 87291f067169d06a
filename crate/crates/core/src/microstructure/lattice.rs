use nalgebra::{Matrix3, Vector3};

use super::target::{LaminateBasis, LaminateCase};
use crate::qtensor::SymTensor3;

/// Index of one cell of the infinite unit-frequency tiling. `kind` is in `1..=4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId {
    pub kind: usize,
    pub k1: i64,
    pub k3: i64,
}

/// Half-plane `normal . p <= offset` in the `(w1, w3)` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Facet {
    pub normal: [f64; 2],
    pub offset: f64,
}

impl Facet {
    /// Distance from an interior point to the facet line.
    pub fn depth(&self, p: [f64; 2]) -> f64 {
        self.offset - (self.normal[0] * p[0] + self.normal[1] * p[1])
    }
}

/// The laminate extended periodically to all of space at unit frequency.
/// Cells are invariant in the second coordinate.
#[derive(Debug, Clone)]
pub struct PeriodicLaminate {
    basis: LaminateBasis,
    q: Matrix3<f64>,
    sym: [SymTensor3; 4],
}

impl PeriodicLaminate {
    pub fn new(basis: LaminateBasis) -> Self {
        let q = basis.target.diagonal().to_matrix();
        let sym = [basis.q(1), basis.q(2), basis.q(3), basis.q(4)];
        Self { basis, q, sym }
    }

    pub fn basis(&self) -> &LaminateBasis {
        &self.basis
    }

    pub fn case(&self) -> LaminateCase {
        self.basis.case
    }

    fn t(&self) -> f64 {
        self.basis.period.unwrap_or(1.0)
    }

    /// Lattice vectors in the `(w1, w3)` plane.
    pub fn lattice(&self) -> ([f64; 2], [f64; 2]) {
        match self.case() {
            LaminateCase::Generic => ([2.0 * self.t(), 0.0], [0.0, 2.0]),
            LaminateCase::Degenerate => ([1.0, 0.0], [0.0, 4.0]),
        }
    }

    /// Lower corner and extent of a rectangular fundamental domain.
    pub fn fundamental_rect(&self) -> ([f64; 2], [f64; 2]) {
        match self.case() {
            LaminateCase::Generic => ([-self.t(), -1.0], [2.0 * self.t(), 2.0]),
            LaminateCase::Degenerate => ([0.0, -2.0], [1.0, 4.0]),
        }
    }

    pub fn locate(&self, w1: f64, w3: f64) -> CellId {
        match self.case() {
            LaminateCase::Generic => {
                let t = self.t();
                let k3 = ((w3 + 1.0) / 2.0).floor();
                let r3 = w3 - 2.0 * k3;
                let upper = r3 >= 0.0;
                let s = if upper { w1 + t * r3 } else { w1 - t * r3 };
                let k1 = ((s + t) / (2.0 * t)).floor();
                let sp = s - 2.0 * t * k1;
                let kind = match (upper, sp >= 0.0) {
                    (true, true) => 1,
                    (true, false) => 2,
                    (false, true) => 3,
                    (false, false) => 4,
                };
                CellId { kind, k1: k1 as i64, k3: k3 as i64 }
            }
            LaminateCase::Degenerate => {
                let k3 = ((w3 + 2.0) / 4.0).floor();
                let r = w3 - 4.0 * k3;
                let kind = if r >= 1.0 {
                    4
                } else if r >= 0.0 {
                    1
                } else if r >= -1.0 {
                    2
                } else {
                    3
                };
                CellId { kind, k1: 0, k3: k3 as i64 }
            }
        }
    }

    pub fn translation(&self, id: CellId) -> [f64; 2] {
        let (l1, l3) = self.lattice();
        let (k1, k3) = (id.k1 as f64, id.k3 as f64);
        [k1 * l1[0] + k3 * l3[0], k1 * l1[1] + k3 * l3[1]]
    }

    /// Counter-clockwise vertices of a generic rhomboid cell.
    pub fn rhomboid(&self, id: CellId) -> Option<[[f64; 2]; 4]> {
        if self.case() == LaminateCase::Degenerate {
            return None;
        }
        let t = self.t();
        let base = match id.kind {
            1 => [[0.0, 0.0], [t, 0.0], [0.0, 1.0], [-t, 1.0]],
            2 => [[-t, 0.0], [0.0, 0.0], [-t, 1.0], [-2.0 * t, 1.0]],
            3 => [[-t, -1.0], [0.0, -1.0], [t, 0.0], [0.0, 0.0]],
            _ => [[-2.0 * t, -1.0], [-t, -1.0], [0.0, 0.0], [-t, 0.0]],
        };
        let sh = self.translation(id);
        Some(base.map(|v| [v[0] + sh[0], v[1] + sh[1]]))
    }

    /// Height range of a degenerate slab cell.
    pub fn slab(&self, id: CellId) -> Option<(f64, f64)> {
        if self.case() == LaminateCase::Generic {
            return None;
        }
        let lo = match id.kind {
            1 => 0.0,
            2 => -1.0,
            3 => -2.0,
            _ => 1.0,
        } + 4.0 * id.k3 as f64;
        Some((lo, lo + 1.0))
    }

    /// Bounding half-planes of a cell.
    pub fn facets(&self, id: CellId) -> Vec<Facet> {
        if let Some(v) = self.rhomboid(id) {
            (0..4)
                .map(|i| {
                    let (a, b) = (v[i], v[(i + 1) % 4]);
                    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                    let len = dx.hypot(dy);
                    let normal = [dy / len, -dx / len];
                    Facet { normal, offset: normal[0] * a[0] + normal[1] * a[1] }
                })
                .collect()
        } else {
            let (lo, hi) = self.slab(id).unwrap_or((0.0, 1.0));
            vec![
                Facet { normal: [0.0, -1.0], offset: -lo },
                Facet { normal: [0.0, 1.0], offset: hi },
            ]
        }
    }

    /// Smallest interior angle of a cell cross-section.
    pub fn min_angle(&self) -> f64 {
        match self.case() {
            LaminateCase::Generic => (1.0 / self.t()).atan(),
            LaminateCase::Degenerate => std::f64::consts::FRAC_PI_2,
        }
    }

    /// Radius of the largest disc inscribed in a cell cross-section.
    pub fn inradius(&self) -> f64 {
        match self.case() {
            LaminateCase::Generic => {
                let t = self.t();
                0.5 * (t / (1.0 + t * t).sqrt()).min(1.0)
            }
            LaminateCase::Degenerate => 0.5,
        }
    }

    /// Shortest distance between two lattice vertices.
    pub fn vertex_spacing(&self) -> f64 {
        match self.case() {
            LaminateCase::Generic => self.t().min((1.0 + self.t() * self.t()).sqrt()),
            LaminateCase::Degenerate => f64::INFINITY,
        }
    }

    pub fn gradient(&self, kind: usize) -> &Matrix3<f64> {
        self.basis.gradient(kind)
    }

    pub fn q(&self, kind: usize) -> &SymTensor3 {
        &self.sym[kind - 1]
    }

    pub fn target(&self) -> &Matrix3<f64> {
        &self.q
    }

    /// Offset `b` such that `f(w) = G w + b` on the cell, normalized by `f(0) = 0`.
    pub fn offset(&self, id: CellId) -> Vector3<f64> {
        let g = self.gradient(id.kind);
        let base = self.base_offset(id.kind);
        let sh = self.translation(id);
        let p = Vector3::new(sh[0], 0.0, sh[1]);
        base + (self.q - g) * p
    }

    pub fn f(&self, w: &Vector3<f64>) -> Vector3<f64> {
        let id = self.locate(w[0], w[2]);
        self.gradient(id.kind) * w + self.offset(id)
    }

    /// Periodic part `f(w) - Q w`.
    pub fn periodic_part(&self, w: &Vector3<f64>) -> Vector3<f64> {
        self.periodic_part_in(self.locate(w[0], w[2]), w)
    }

    /// Periodic part on a known cell, evaluated relative to the cell's lattice
    /// translation so that large `w` loses no precision.
    pub fn periodic_part_in(&self, id: CellId, w: &Vector3<f64>) -> Vector3<f64> {
        let sh = self.translation(id);
        let local = Vector3::new(w[0] - sh[0], w[1], w[2] - sh[1]);
        (self.gradient(id.kind) - self.q) * local + self.base_offset(id.kind)
    }

    fn base_offset(&self, kind: usize) -> Vector3<f64> {
        match (self.case(), kind) {
            (LaminateCase::Degenerate, 3 | 4) => Vector3::new(0.0, -4.0 * self.basis.gbc, 0.0),
            _ => Vector3::zeros(),
        }
    }
}
