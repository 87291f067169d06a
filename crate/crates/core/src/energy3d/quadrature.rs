use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use nalgebra::Vector3;
use rayon::prelude::*;

use super::fields::{Field3D, Grain, TensorField};
use super::scaling::ScalingParams;
use super::strain::{bonding_energy_density, film_energy_density, rescaled_strain_bonding, rescaled_strain_film};
use super::Energy3dError;
use crate::qtensor::MaterialParams;

/// Midpoint-rule cell counts per axis for each layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quadrature {
    pub film: [usize; 3],
    pub bonding: [usize; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyBreakdown {
    pub film: f64,
    pub bonding: f64,
    pub frank: f64,
}

impl EnergyBreakdown {
    pub fn total(&self) -> f64 {
        self.film + self.bonding + self.frank
    }
}

/// Finest cell size per axis that resolves the microstructure.
pub fn required_spacing(s: &ScalingParams) -> [f64; 3] {
    let a = s.eta * s.epsilon / 8.0;
    [a, a, s.eta / 8.0]
}

fn midpoint_grid(lo: [f64; 3], hi: [f64; 3], n: [usize; 3]) -> ([f64; 3], f64) {
    let h: [f64; 3] = std::array::from_fn(|k| (hi[k] - lo[k]) / n[k] as f64);
    (h, h[0] * h[1] * h[2])
}

/// Sum `f` over midpoint cells of a box, parallel over the first axis with an
/// ordered reduction.
fn midpoint_sum<F>(lo: [f64; 3], hi: [f64; 3], n: [usize; 3], f: F) -> f64
where
    F: Fn([f64; 3]) -> f64 + Sync,
{
    let (h, vol) = midpoint_grid(lo, hi, n);
    let slabs: Vec<f64> = (0..n[0])
        .into_par_iter()
        .map(|i| {
            let x0 = lo[0] + (i as f64 + 0.5) * h[0];
            let mut acc = 0.0;
            for j in 0..n[1] {
                let x1 = lo[1] + (j as f64 + 0.5) * h[1];
                for k in 0..n[2] {
                    acc += f([x0, x1, lo[2] + (k as f64 + 0.5) * h[2]]);
                }
            }
            acc
        })
        .collect();
    slabs.iter().sum::<f64>() * vol
}

/// Two-layer energy of a displacement and an order-tensor field by composite
/// midpoint quadrature. The Frank term uses central differences of `q` with
/// half the cell size as step.
#[allow(clippy::too_many_arguments)]
pub fn energy_i(
    film: &dyn Field3D,
    bonding: &dyn Field3D,
    q: &dyn TensorField,
    grain: &Grain,
    scaling: &ScalingParams,
    m: &MaterialParams,
    quad: &Quadrature,
) -> Result<EnergyBreakdown, Energy3dError> {
    let (blo, bhi) = grain.bonding_box();
    let (hb, _) = midpoint_grid(blo, bhi, quad.bonding);
    let need = required_spacing(scaling);
    let fb = bonding.fast_axes();
    let fq = q.fast_axes();
    for k in 0..3 {
        if (fb[k] || fq[k]) && hb[k] > need[k] * (1.0 + 1e-12) {
            return Err(Energy3dError::ResolutionTooCoarse { axis: k, spacing: hb[k], required: need[k] });
        }
    }
    let ff = film.fast_axes();
    let (flo, fhi) = grain.film_box();
    let (hf, _) = midpoint_grid(flo, fhi, quad.film);
    for k in 0..3 {
        if ff[k] && hf[k] > need[k] * (1.0 + 1e-12) {
            return Err(Energy3dError::ResolutionTooCoarse { axis: k, spacing: hf[k], required: need[k] });
        }
    }
    let eps = scaling.epsilon;
    let film_e = midpoint_sum(flo, fhi, quad.film, |x| {
        film_energy_density(&rescaled_strain_film(&film.gradient(x), eps), m)
    });
    let bond_e = midpoint_sum(blo, bhi, quad.bonding, |x| {
        bonding_energy_density(&rescaled_strain_bonding(&bonding.gradient(x), eps), &q.sample(x), m)
    });
    let weights = [eps * eps, eps * eps, 1.0];
    let frank = if scaling.delta_eps == 0.0 {
        0.0
    } else {
        let d2 = scaling.delta_eps * scaling.delta_eps;
        midpoint_sum(blo, bhi, quad.bonding, |x| {
            let mut acc = 0.0;
            for k in 0..3 {
                let step = 0.5 * hb[k];
                let mut xp = x;
                let mut xm = x;
                xp[k] += step;
                xm[k] -= step;
                let d = (q.sample(xp) - q.sample(xm)).frob_norm_sq() / (4.0 * step * step);
                acc += weights[k] * d;
            }
            0.5 * d2 * acc
        })
    };
    Ok(EnergyBreakdown { film: film_e, bonding: bond_e, frank })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincareReport {
    pub lhs: f64,
    pub rhs: f64,
}

impl PoincareReport {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-12) + 1e-300
    }
}

/// Compares `||u||` with `|W| ||d_3 u||` in `L^2(omega x W)` by tensor Gauss-Legendre quadrature.
pub fn poincare_check(field: &dyn Field3D, grain: &Grain, w: [f64; 2], points: usize) -> PoincareReport {
    let rule = GaussLegendre::new(NonZeroUsize::new(points.max(1)).expect("nonzero"));
    let nodes = |a: f64, b: f64| -> Vec<(f64, f64)> {
        rule.as_node_weight_pairs().iter().map(|&(x, wt)| (0.5 * (a + b) + 0.5 * (b - a) * x, 0.5 * (b - a) * wt)).collect()
    };
    let (n1, n2, n3) = (nodes(grain.x[0], grain.x[1]), nodes(grain.y[0], grain.y[1]), nodes(w[0], w[1]));
    let (mut u2, mut d2) = (0.0, 0.0);
    for &(a, wa) in &n1 {
        for &(b, wb) in &n2 {
            for &(c, wc) in &n3 {
                let wt = wa * wb * wc;
                let x = [a, b, c];
                u2 += wt * field.value(x).norm_squared();
                let g = field.gradient(x);
                d2 += wt * Vector3::new(g[(0, 2)], g[(1, 2)], g[(2, 2)]).norm_squared();
            }
        }
    }
    PoincareReport { lhs: u2.sqrt(), rhs: (w[1] - w[0]) * d2.sqrt() }
}
