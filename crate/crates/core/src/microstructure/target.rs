use nalgebra::Matrix3;

use super::MicrostructureError;
use crate::qtensor::{eig_sym3, is_biaxial, QTensor, SymTensor3, MEMBERSHIP_TOL};

/// Switch to the slab construction when `a + 1/3` falls below this.
pub const DEGENERATE_GAP: f64 = 1e-8;

/// Sorted eigenvalues `a <= b <= c` of a biaxial target and the rotation
/// whose columns are the matching eigenvectors, `Q = R diag(a,b,c) R^T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalTarget {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub rotation: Matrix3<f64>,
}

impl DiagonalTarget {
    pub fn diagonal(&self) -> SymTensor3 {
        SymTensor3::diag(self.a, self.b, self.c)
    }

    pub fn reconstruct(&self) -> SymTensor3 {
        self.diagonal().rotate(&self.rotation)
    }
}

pub fn diagonalize_target(q: &QTensor) -> Result<DiagonalTarget, MicrostructureError> {
    let e = eig_sym3(q.sym());
    if !is_biaxial(q, MEMBERSHIP_TOL) {
        return Err(MicrostructureError::NotBiaxial { eigenvalues: e.values });
    }
    let mut rotation = e.frame;
    if rotation.determinant() < 0.0 {
        let c = -rotation.column(2);
        rotation.set_column(2, &c);
    }
    let [a, b, c] = e.values;
    Ok(DiagonalTarget { a, b, c, rotation })
}

/// `T = sqrt((c + 1/3) / (a + 1/3))`.
pub fn lamination_period(a: f64, c: f64) -> Result<f64, MicrostructureError> {
    let ap = a + 1.0 / 3.0;
    if !(ap > DEGENERATE_GAP) {
        return Err(MicrostructureError::DegenerateCase { a });
    }
    Ok(((c + 1.0 / 3.0) / ap).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaminateCase {
    /// Rhomboid prisms of period `2T x 2`.
    Generic,
    /// Slabs of unit height, period 4 in the third coordinate.
    Degenerate,
}

/// Four compatible gradients whose symmetric parts are uniaxial and whose
/// mean is the diagonal target.
#[derive(Debug, Clone, PartialEq)]
pub struct LaminateBasis {
    pub g: [Matrix3<f64>; 4],
    pub gab: f64,
    pub gac: f64,
    pub gbc: f64,
    /// `None` in the degenerate case.
    pub period: Option<f64>,
    pub case: LaminateCase,
    pub target: DiagonalTarget,
}

impl LaminateBasis {
    /// `sym(G_j)`, `j` in `1..=4`.
    pub fn q(&self, j: usize) -> SymTensor3 {
        SymTensor3::sym_of(&self.g[j - 1])
    }

    pub fn gradient(&self, j: usize) -> &Matrix3<f64> {
        &self.g[j - 1]
    }

    pub fn mean(&self) -> Matrix3<f64> {
        (self.g[0] + self.g[1] + self.g[2] + self.g[3]) / 4.0
    }
}

fn sq(x: f64) -> f64 {
    x.max(0.0).sqrt()
}

pub fn build_laminate_basis(t: &DiagonalTarget) -> LaminateBasis {
    let (a, b, c) = (t.a, t.b, t.c);
    let third = 1.0 / 3.0;
    let gab = sq(a + third) * sq(b + third);
    let gac = sq(a + third) * sq(c + third);
    let gbc = sq(b + third) * sq(c + third);
    let m = |g12: f64, g13: f64, g21: f64, g23: f64, a11: f64| {
        Matrix3::new(a11, g12, g13, g21, b, g23, 0.0, 0.0, c)
    };
    if a + third <= DEGENERATE_GAP {
        let g1 = m(0.0, 0.0, 0.0, -2.0 * gbc, -third);
        let g2 = m(0.0, 0.0, 0.0, 2.0 * gbc, -third);
        LaminateBasis { g: [g1, g2, g1, g2], gab, gac, gbc, period: None, case: LaminateCase::Degenerate, target: *t }
    } else {
        let g = [
            m(0.0, 2.0 * gac, -2.0 * gab, -2.0 * gbc, a),
            m(0.0, 2.0 * gac, 2.0 * gab, 2.0 * gbc, a),
            m(0.0, -2.0 * gac, -2.0 * gab, 2.0 * gbc, a),
            m(0.0, -2.0 * gac, 2.0 * gab, -2.0 * gbc, a),
        ];
        let period = ((c + third) / (a + third)).sqrt();
        LaminateBasis { g, gab, gac, gbc, period: Some(period), case: LaminateCase::Generic, target: *t }
    }
}
