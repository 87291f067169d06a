use nalgebra::Matrix3;

use crate::qtensor::{MaterialParams, SymTensor3};

/// Thickness-rescaled strain of one layer.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RescaledStrain(pub SymTensor3);

impl RescaledStrain {
    pub fn tensor(&self) -> &SymTensor3 {
        &self.0
    }
}

/// `grad[(i, j)] = d u_i / d x_j`.
pub fn rescaled_strain_film(grad: &Matrix3<f64>, eps: f64) -> RescaledStrain {
    let e = SymTensor3::sym_of(grad);
    RescaledStrain(SymTensor3 {
        a11: e.a11,
        a22: e.a22,
        a12: e.a12,
        a13: e.a13 / eps,
        a23: e.a23 / eps,
        a33: e.a33 / (eps * eps),
    })
}

pub fn rescaled_strain_bonding(grad: &Matrix3<f64>, eps: f64) -> RescaledStrain {
    let e = SymTensor3::sym_of(grad);
    let shear = |a: usize| 0.5 * (grad[(2, a)] / eps + grad[(a, 2)]);
    RescaledStrain(SymTensor3 {
        a11: eps * e.a11,
        a22: eps * e.a22,
        a12: eps * e.a12,
        a13: shear(0),
        a23: shear(1),
        a33: grad[(2, 2)] / (eps * eps),
    })
}

/// `(|k|^2 + lambda/(2 mu) tr^2 k) / 2`.
pub fn film_energy_density(k: &RescaledStrain, m: &MaterialParams) -> f64 {
    0.5 * (k.0.frob_norm_sq() + m.trace_coeff() * k.0.trace().powi(2))
}

/// Bonding-layer density without the Frank term.
pub fn bonding_energy_density(k: &RescaledStrain, q: &SymTensor3, m: &MaterialParams) -> f64 {
    0.5 * ((k.0 - *q).frob_norm_sq() + m.trace_coeff() * k.0.trace().powi(2))
}
