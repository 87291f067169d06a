use nalgebra::Vector3;

use super::eig::eig_sym3;
use super::projection::{is_uniaxial, LAMBDA_MAX};
use super::{QTensor, QTensorError, SymTensor3};

/// Unit vector on the sphere; `n` and `-n` describe the same order tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Director(Vector3<f64>);

impl Director {
    pub fn new(v: Vector3<f64>) -> Result<Self, QTensorError> {
        let n = v.norm();
        if !(n > 1e-300) || !n.is_finite() {
            return Err(QTensorError::ZeroDirector);
        }
        Ok(Self(v / n))
    }

    pub fn e1() -> Self {
        Self(Vector3::x())
    }

    pub fn e2() -> Self {
        Self(Vector3::y())
    }

    pub fn e3() -> Self {
        Self(Vector3::z())
    }

    pub fn as_vector(&self) -> &Vector3<f64> {
        &self.0
    }

    /// Representative with the first nonzero component positive.
    pub fn canonical(self) -> Self {
        for k in 0..3 {
            if self.0[k].abs() > 1e-14 {
                return if self.0[k] < 0.0 { Self(-self.0) } else { self };
            }
        }
        self
    }
}

/// `n n^T - I/3`.
pub fn from_director(n: &Director) -> QTensor {
    let v = n.0;
    QTensor::from_deviatoric(SymTensor3::new(
        v[0] * v[0],
        v[1] * v[1],
        v[2] * v[2],
        v[0] * v[1],
        v[0] * v[2],
        v[1] * v[2],
    ))
}

/// Eigenvector of the eigenvalue nearest `2/3`.
pub fn lift_director(q: &QTensor) -> Result<Director, QTensorError> {
    if !is_uniaxial(q, 1e-8) {
        let e = eig_sym3(q.sym());
        return Err(QTensorError::NotUniaxial { eigenvalues: e.values });
    }
    let e = eig_sym3(q.sym());
    let k = (0..3)
        .min_by(|&i, &j| (e.values[i] - LAMBDA_MAX).abs().total_cmp(&(e.values[j] - LAMBDA_MAX).abs()))
        .unwrap_or(2);
    Ok(Director(e.vector(k)).canonical())
}

/// Great-circle interpolation after flipping `n2` into the hemisphere of `n1`.
///
/// Returns `n1` when the aligned endpoints are numerically antipodal, which
/// cannot happen after alignment.
pub fn slerp_director(n1: &Director, n2: &Director, t: f64) -> Director {
    let a = n1.0;
    let mut b = n2.0;
    if a.dot(&b) < 0.0 {
        b = -b;
    }
    let c = a.dot(&b).clamp(-1.0, 1.0);
    if c <= -1.0 + 1e-15 {
        return *n1;
    }
    let omega = c.acos();
    if omega < 1e-12 {
        let v = a * (1.0 - t) + b * t;
        return Director(v / v.norm());
    }
    let s = omega.sin();
    let v = a * (((1.0 - t) * omega).sin() / s) + b * ((t * omega).sin() / s);
    Director(v / v.norm())
}
