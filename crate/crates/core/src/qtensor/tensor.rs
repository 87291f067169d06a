use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Matrix3;

use super::QTensorError;

/// Symmetric 3x3 matrix stored by its six independent entries.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymTensor3 {
    pub a11: f64,
    pub a22: f64,
    pub a33: f64,
    pub a12: f64,
    pub a13: f64,
    pub a23: f64,
}

impl SymTensor3 {
    pub const ZERO: SymTensor3 = SymTensor3 {
        a11: 0.0,
        a22: 0.0,
        a33: 0.0,
        a12: 0.0,
        a13: 0.0,
        a23: 0.0,
    };

    pub const fn new(a11: f64, a22: f64, a33: f64, a12: f64, a13: f64, a23: f64) -> Self {
        Self { a11, a22, a33, a12, a13, a23 }
    }

    pub const fn diag(d1: f64, d2: f64, d3: f64) -> Self {
        Self::new(d1, d2, d3, 0.0, 0.0, 0.0)
    }

    pub fn identity() -> Self {
        Self::diag(1.0, 1.0, 1.0)
    }

    /// Symmetric part of an arbitrary 3x3 matrix.
    pub fn sym_of(m: &Matrix3<f64>) -> Self {
        Self::new(
            m[(0, 0)],
            m[(1, 1)],
            m[(2, 2)],
            0.5 * (m[(0, 1)] + m[(1, 0)]),
            0.5 * (m[(0, 2)] + m[(2, 0)]),
            0.5 * (m[(1, 2)] + m[(2, 1)]),
        )
    }

    pub fn to_matrix(&self) -> Matrix3<f64> {
        Matrix3::new(
            self.a11, self.a12, self.a13, //
            self.a12, self.a22, self.a23, //
            self.a13, self.a23, self.a33,
        )
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match (i.min(j), i.max(j)) {
            (0, 0) => self.a11,
            (1, 1) => self.a22,
            (2, 2) => self.a33,
            (0, 1) => self.a12,
            (0, 2) => self.a13,
            (1, 2) => self.a23,
            _ => panic!("index ({i},{j}) out of range for a 3x3 tensor"),
        }
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22 + self.a33
    }

    /// Traceless part `A - tr(A)/3 I`.
    pub fn deviatoric(&self) -> Self {
        let m = self.trace() / 3.0;
        Self::new(self.a11 - m, self.a22 - m, self.a33 - m, self.a12, self.a13, self.a23)
    }

    /// Frobenius inner product (off-diagonal entries counted twice).
    pub fn dot(&self, o: &Self) -> f64 {
        self.a11 * o.a11
            + self.a22 * o.a22
            + self.a33 * o.a33
            + 2.0 * (self.a12 * o.a12 + self.a13 * o.a13 + self.a23 * o.a23)
    }

    pub fn frob_norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn frob_norm(&self) -> f64 {
        self.frob_norm_sq().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.a11, self.a22, self.a33, self.a12, self.a13, self.a23]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4], a[5])
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        let a = self.to_array();
        let b = o.to_array();
        a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    /// `R A R^T`.
    pub fn rotate(&self, r: &Matrix3<f64>) -> Self {
        Self::sym_of(&(r * self.to_matrix() * r.transpose()))
    }
}

impl Add for SymTensor3 {
    type Output = SymTensor3;
    fn add(self, o: Self) -> Self {
        Self::new(
            self.a11 + o.a11,
            self.a22 + o.a22,
            self.a33 + o.a33,
            self.a12 + o.a12,
            self.a13 + o.a13,
            self.a23 + o.a23,
        )
    }
}

impl Sub for SymTensor3 {
    type Output = SymTensor3;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for SymTensor3 {
    type Output = SymTensor3;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl Mul<f64> for SymTensor3 {
    type Output = SymTensor3;
    fn mul(self, s: f64) -> Self {
        Self::new(
            self.a11 * s,
            self.a22 * s,
            self.a33 * s,
            self.a12 * s,
            self.a13 * s,
            self.a23 * s,
        )
    }
}

/// Trace tolerance accepted by [`QTensor::new`].
pub const TRACE_TOL: f64 = 1e-12;

/// Symmetric traceless order tensor.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QTensor(SymTensor3);

impl QTensor {
    pub const ZERO: QTensor = QTensor(SymTensor3::ZERO);

    pub fn new(s: SymTensor3) -> Result<Self, QTensorError> {
        let tr = s.trace();
        if !(tr.abs() <= TRACE_TOL) {
            return Err(QTensorError::NotTraceless { trace: tr });
        }
        Ok(Self(s))
    }

    /// Drops the trace of `s`; always succeeds.
    pub fn from_deviatoric(s: SymTensor3) -> Self {
        Self(s.deviatoric())
    }

    pub fn diag(d1: f64, d2: f64, d3: f64) -> Result<Self, QTensorError> {
        Self::new(SymTensor3::diag(d1, d2, d3))
    }

    pub fn sym(&self) -> &SymTensor3 {
        &self.0
    }

    pub fn into_sym(self) -> SymTensor3 {
        self.0
    }

    pub fn to_matrix(&self) -> Matrix3<f64> {
        self.0.to_matrix()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn rotate(&self, r: &Matrix3<f64>) -> Self {
        Self::from_deviatoric(self.0.rotate(r))
    }
}

impl From<QTensor> for SymTensor3 {
    fn from(q: QTensor) -> Self {
        q.0
    }
}

/// Lamé pair of the nondimensional model; `gamma` is fixed to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    lambda: f64,
    mu: f64,
    gamma: f64,
}

impl MaterialParams {
    pub fn new(lambda: f64, mu: f64) -> Result<Self, QTensorError> {
        if !(lambda.is_finite() && mu.is_finite()) {
            return Err(QTensorError::InvalidMaterial("Lamé parameters must be finite".into()));
        }
        if !(mu > 0.0) {
            return Err(QTensorError::InvalidMaterial(format!("mu > 0 violated (mu = {mu})")));
        }
        if !(lambda > 0.0) {
            return Err(QTensorError::InvalidMaterial(format!(
                "lambda > 0 violated (lambda = {lambda})"
            )));
        }
        if !(2.0 * mu + 3.0 * lambda > 0.0) {
            return Err(QTensorError::InvalidMaterial(format!(
                "2 mu + 3 lambda > 0 violated ({})",
                2.0 * mu + 3.0 * lambda
            )));
        }
        Ok(Self { lambda, mu, gamma: 1.0 })
    }

    /// `lambda = mu = 1`.
    pub fn unit() -> Self {
        Self { lambda: 1.0, mu: 1.0, gamma: 1.0 }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `lambda / (lambda + 2 mu)`, the weight on the out-of-plane diagonal entry.
    pub fn weight33(&self) -> f64 {
        self.lambda / (self.lambda + 2.0 * self.mu)
    }

    /// `lambda / (2 mu)`, the trace coefficient of the three-dimensional densities.
    pub fn trace_coeff(&self) -> f64 {
        self.lambda / (2.0 * self.mu)
    }
}
