#![allow(dead_code)]

pub mod manufactured;
pub mod oracles;

use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use nematic_membrane::qtensor::{QTensor, SymTensor3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_rotation(rng: &mut ChaCha8Rng) -> Matrix3<f64> {
    let axis = loop {
        let v = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        if v.norm() > 0.1 && v.norm() <= 1.0 {
            break v;
        }
    };
    let angle = rng.random_range(0.0..std::f64::consts::TAU);
    Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle).into_inner()
}

pub fn random_sym(rng: &mut ChaCha8Rng, scale: f64) -> SymTensor3 {
    SymTensor3::from_array(std::array::from_fn(|_| rng.random_range(-scale..scale)))
}

/// Rejection sample of the biaxial set: random traceless matrices are kept
/// when the eigenvalue bounds (checked through principal minors) hold.
pub fn random_biaxial(rng: &mut ChaCha8Rng) -> QTensor {
    loop {
        let a = QTensor::from_deviatoric(random_sym(rng, 0.7));
        if oracles::in_biaxial_by_minors(a.sym()) {
            return a;
        }
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
