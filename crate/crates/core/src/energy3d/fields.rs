use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};

use super::scaling::ScalingParams;
use super::Energy3dError;
use crate::effective::{optimal_k33_film, optimal_k33_nematic};
use crate::microstructure::{build_laminate_basis, diagonalize_target, LaminateCase, LayeredDirector, PeriodicLaminate};
use crate::qtensor::{MaterialParams, QTensor, SymTensor3};

/// Displacement with an analytic gradient, `gradient(x)[(i, j)] = d u_i / d x_j`.
pub trait Field3D: Send + Sync {
    fn value(&self, x: [f64; 3]) -> Vector3<f64>;
    fn gradient(&self, x: [f64; 3]) -> Matrix3<f64>;
    /// Axes along which the field oscillates on the microstructure scale.
    fn fast_axes(&self) -> [bool; 3] {
        [false; 3]
    }
}

/// Order-tensor field on the bonding layer.
pub trait TensorField: Send + Sync {
    fn sample(&self, x: [f64; 3]) -> SymTensor3;
    fn fast_axes(&self) -> [bool; 3] {
        [false; 3]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantTensor(pub SymTensor3);

impl TensorField for ConstantTensor {
    fn sample(&self, _x: [f64; 3]) -> SymTensor3 {
        self.0
    }
}

/// The zero displacement.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroField;

impl Field3D for ZeroField {
    fn value(&self, _x: [f64; 3]) -> Vector3<f64> {
        Vector3::zeros()
    }
    fn gradient(&self, _x: [f64; 3]) -> Matrix3<f64> {
        Matrix3::zeros()
    }
}

/// Rectangular planar region `omega`; the bonding layer below it is
/// `omega x (-1, 0)` and the film above is `omega x (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grain {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl Grain {
    pub fn new(x: [f64; 2], y: [f64; 2]) -> Result<Self, Energy3dError> {
        let ok = |r: [f64; 2]| r[0].is_finite() && r[1].is_finite() && r[1] > r[0];
        if !(ok(x) && ok(y)) {
            return Err(Energy3dError::InvalidGrain);
        }
        Ok(Self { x, y })
    }

    pub fn unit() -> Self {
        Self { x: [0.0, 1.0], y: [0.0, 1.0] }
    }

    pub fn area(&self) -> f64 {
        (self.x[1] - self.x[0]) * (self.y[1] - self.y[0])
    }

    /// Lower and upper corners of the bonding block.
    pub fn bonding_box(&self) -> ([f64; 3], [f64; 3]) {
        ([self.x[0], self.y[0], -1.0], [self.x[1], self.y[1], 0.0])
    }

    pub fn film_box(&self) -> ([f64; 3], [f64; 3]) {
        ([self.x[0], self.y[0], 0.0], [self.x[1], self.y[1], 1.0])
    }
}

/// `6t^5 - 15t^4 + 10t^3` clamped to `[0, 1]`, with its derivative.
pub fn smootherstep(t: f64) -> (f64, f64) {
    if t <= 0.0 {
        (0.0, 0.0)
    } else if t >= 1.0 {
        (1.0, 0.0)
    } else {
        (t * t * t * (10.0 - 15.0 * t + 6.0 * t * t), 30.0 * t * t * (1.0 - t) * (1.0 - t))
    }
}

/// One-dimensional collar on `[lo, hi]`: zero within `width / 8` of either
/// end, one beyond `width`, smootherstep in between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Collar1D {
    pub lo: f64,
    pub hi: f64,
    pub width: f64,
}

impl Collar1D {
    fn ramp(&self, d: f64) -> (f64, f64) {
        let a = self.width / 8.0;
        let span = self.width - a;
        let (v, dv) = smootherstep((d - a) / span);
        (v, dv / span)
    }

    pub fn eval(&self, x: f64) -> (f64, f64) {
        let (l, dl) = self.ramp(x - self.lo);
        let (r, dr) = self.ramp(self.hi - x);
        (l * r, dl * r - l * dr)
    }

    /// Points where the profile changes its polynomial piece.
    pub fn breakpoints(&self) -> Vec<f64> {
        let a = self.width / 8.0;
        let mut v = vec![
            self.lo,
            self.lo + a,
            self.lo + self.width,
            self.hi - self.width,
            self.hi - a,
            self.hi,
        ];
        v.retain(|p| *p >= self.lo && *p <= self.hi);
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() <= 1e-15);
        v
    }
}

/// Product cut-off `theta(x) = prod_k c_k(x_k)` on a box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    pub axes: [Collar1D; 3],
    pub rho: f64,
}

impl Cutoff {
    pub fn value(&self, x: [f64; 3]) -> f64 {
        (0..3).map(|k| self.axes[k].eval(x[k]).0).product()
    }

    pub fn gradient(&self, x: [f64; 3]) -> [f64; 3] {
        let e: [(f64, f64); 3] = std::array::from_fn(|k| self.axes[k].eval(x[k]));
        [e[0].1 * e[1].0 * e[2].0, e[0].0 * e[1].1 * e[2].0, e[0].0 * e[1].0 * e[2].1]
    }

    /// Largest admissible collar: the inradius of the box.
    pub fn max_rho(lo: [f64; 3], hi: [f64; 3]) -> f64 {
        (0..3).map(|k| 0.5 * (hi[k] - lo[k])).fold(f64::INFINITY, f64::min)
    }
}

pub fn cutoff_theta(lo: [f64; 3], hi: [f64; 3], rho: f64) -> Result<Cutoff, Energy3dError> {
    let limit = Cutoff::max_rho(lo, hi);
    if !(rho > 0.0 && rho < limit) {
        return Err(Energy3dError::RhoTooLarge { rho, limit });
    }
    Ok(Cutoff { axes: std::array::from_fn(|k| Collar1D { lo: lo[k], hi: hi[k], width: rho }), rho })
}

/// Scalar target on the grain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarTarget {
    Constant(f64),
    Affine { c0: f64, grad: [f64; 2] },
}

impl ScalarTarget {
    pub fn eval(&self, x: [f64; 2]) -> (f64, [f64; 2]) {
        match *self {
            ScalarTarget::Constant(c) => (c, [0.0; 2]),
            ScalarTarget::Affine { c0, grad } => (c0 + grad[0] * x[0] + grad[1] * x[1], grad),
        }
    }
}

/// Compactly supported approximant `c(x') * target(x')` with a collar of width `sqrt(eps)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HApprox {
    pub target: ScalarTarget,
    pub collar: [Collar1D; 2],
}

impl HApprox {
    pub fn value(&self, x: [f64; 2]) -> f64 {
        let (t, _) = self.target.eval(x);
        t * self.collar[0].eval(x[0]).0 * self.collar[1].eval(x[1]).0
    }

    pub fn gradient(&self, x: [f64; 2]) -> [f64; 2] {
        let (t, dt) = self.target.eval(x);
        let (a, da) = self.collar[0].eval(x[0]);
        let (b, db) = self.collar[1].eval(x[1]);
        [dt[0] * a * b + t * da * b, dt[1] * a * b + t * a * db]
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.target, ScalarTarget::Constant(c) if c == 0.0)
    }
}

pub fn build_h_approximant(target: ScalarTarget, grain: &Grain, eps: f64) -> HApprox {
    let w = eps.sqrt();
    HApprox {
        target,
        collar: [
            Collar1D { lo: grain.x[0], hi: grain.x[1], width: w },
            Collar1D { lo: grain.y[0], hi: grain.y[1], width: w },
        ],
    }
}

/// Approximants `(h, h_hat)` of the optimal thickness strains for the
/// nematic layer and the film.
pub fn build_h_approximants(
    h_target: ScalarTarget,
    hhat_target: ScalarTarget,
    grain: &Grain,
    eps: f64,
) -> (HApprox, HApprox) {
    (build_h_approximant(h_target, grain, eps), build_h_approximant(hhat_target, grain, eps))
}

/// In-plane displacement target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlanarTarget {
    Constant([f64; 2]),
    /// `u(x') = u0 + grad x'`, `grad[a][b] = d u_a / d x_b`.
    Affine { u0: [f64; 2], grad: [[f64; 2]; 2] },
}

impl PlanarTarget {
    pub fn value(&self, x: [f64; 2]) -> [f64; 2] {
        match *self {
            PlanarTarget::Constant(u) => u,
            PlanarTarget::Affine { u0, grad } => {
                [u0[0] + grad[0][0] * x[0] + grad[0][1] * x[1], u0[1] + grad[1][0] * x[0] + grad[1][1] * x[1]]
            }
        }
    }

    pub fn gradient(&self) -> [[f64; 2]; 2] {
        match *self {
            PlanarTarget::Constant(_) => [[0.0; 2]; 2],
            PlanarTarget::Affine { grad, .. } => grad,
        }
    }
}

/// Film recovery `v = (u(x'), eps^2 (x3 h_hat + h))` on `omega x (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilmRecovery {
    pub ubar: PlanarTarget,
    pub h: HApprox,
    pub hhat: HApprox,
    pub eps: f64,
}

impl Field3D for FilmRecovery {
    fn value(&self, x: [f64; 3]) -> Vector3<f64> {
        let p = [x[0], x[1]];
        let u = self.ubar.value(p);
        let e2 = self.eps * self.eps;
        Vector3::new(u[0], u[1], e2 * (x[2] * self.hhat.value(p) + self.h.value(p)))
    }

    fn gradient(&self, x: [f64; 3]) -> Matrix3<f64> {
        let p = [x[0], x[1]];
        let g = self.ubar.gradient();
        let e2 = self.eps * self.eps;
        let dh = self.h.gradient(p);
        let dhh = self.hhat.gradient(p);
        Matrix3::new(
            g[0][0],
            g[0][1],
            0.0,
            g[1][0],
            g[1][1],
            0.0,
            e2 * (x[2] * dhh[0] + dh[0]),
            e2 * (x[2] * dhh[1] + dh[1]),
            e2 * self.hhat.value(p),
        )
    }
}

/// Film recovery matching a nematic layer whose optimal thickness strain is
/// set by `q33`.
pub fn build_recovery_film(
    ubar: PlanarTarget,
    q33: f64,
    grain: &Grain,
    eps: f64,
    m: &MaterialParams,
) -> FilmRecovery {
    let g = ubar.gradient();
    let hhat = optimal_k33_film(g[0][0] + g[1][1], m);
    let (h, hhat) =
        build_h_approximants(ScalarTarget::Constant(optimal_k33_nematic(q33, m)), ScalarTarget::Constant(hhat), grain, eps);
    FilmRecovery { ubar, h, hhat, eps }
}

/// `x -> (eta f_a(x'/(eta eps), x3/eta), eta eps^2 f_3(x'/(eta eps), x3/eta))`.
#[derive(Clone)]
pub struct AnisotropicRescale<F> {
    pub f: F,
    pub eps: f64,
    pub eta: f64,
}

impl<F: Fn(Vector3<f64>) -> Vector3<f64>> AnisotropicRescale<F> {
    pub fn eval(&self, x: [f64; 3]) -> Vector3<f64> {
        let s = self.eta * self.eps;
        let v = (self.f)(Vector3::new(x[0] / s, x[1] / s, x[2] / self.eta));
        Vector3::new(self.eta * v[0], self.eta * v[1], self.eta * self.eps * self.eps * v[2])
    }
}

pub fn anisotropic_rescale<F: Fn(Vector3<f64>) -> Vector3<f64>>(f: F, eps: f64, eta: f64) -> AnisotropicRescale<F> {
    AnisotropicRescale { f, eps, eta }
}

/// Laminate for one grain in world coordinates on the fast scale `y`.
#[derive(Debug, Clone)]
pub struct GrainLaminate {
    pub rotation: Matrix3<f64>,
    pub layered: LayeredDirector,
    /// `R (G_j - D) R^T`: gradient of the periodic part in `y`.
    pub grad_world: [Matrix3<f64>; 4],
    /// `R sym(G_j) R^T`.
    pub q_world: [SymTensor3; 4],
    pub fast: [bool; 3],
}

impl GrainLaminate {
    /// `delta_y` is the layer half-width on the fast scale.
    pub fn new(qbar: &QTensor, delta_y: f64) -> Result<Self, Energy3dError> {
        let t = diagonalize_target(qbar)?;
        let basis = build_laminate_basis(&t);
        let lam = PeriodicLaminate::new(basis.clone());
        let r = t.rotation;
        let d = t.diagonal().to_matrix();
        let grad_world = std::array::from_fn(|j| r * (basis.g[j] - d) * r.transpose());
        let q_world = std::array::from_fn(|j| basis.q(j + 1).rotate(&r));
        let fast = std::array::from_fn(|k| {
            let dir = r.row(k);
            match lam.case() {
                LaminateCase::Generic => dir[0].abs() > 1e-12 || dir[2].abs() > 1e-12,
                LaminateCase::Degenerate => dir[2].abs() > 1e-12,
            }
        });
        let layered = LayeredDirector::new(lam, delta_y)?;
        Ok(Self { rotation: r, layered, grad_world, q_world, fast })
    }

    pub fn laminate(&self) -> &PeriodicLaminate {
        self.layered.laminate()
    }

    fn to_z(&self, y: &Vector3<f64>) -> Vector3<f64> {
        self.rotation.transpose() * y
    }

    /// Cell type, periodic part `g(y)` and its gradient.
    pub fn periodic(&self, y: &Vector3<f64>) -> (usize, Vector3<f64>, &Matrix3<f64>) {
        let z = self.to_z(y);
        let lam = self.laminate();
        let id = lam.locate(z[0], z[2]);
        (id.kind, self.rotation * lam.periodic_part_in(id, &z), &self.grad_world[id.kind - 1])
    }

    pub fn q_sharp(&self, y: &Vector3<f64>) -> SymTensor3 {
        let z = self.to_z(y);
        self.q_world[self.laminate().locate(z[0], z[2]).kind - 1]
    }

    pub fn q_smooth(&self, y: &Vector3<f64>) -> SymTensor3 {
        let z = self.to_z(y);
        let n = self.rotation * self.layered.director(z[0], z[2]).as_vector();
        SymTensor3::sym_of(&(n * n.transpose())) - SymTensor3::identity() * (1.0 / 3.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// Frank-type order: mollified uniaxial laminate.
    Uniaxial,
    /// De Gennes order: the constant target itself.
    Biaxial,
}

/// Bonding-layer recovery `v = (x3 + 1)(u + eps^2 h e3) + theta w`.
#[derive(Debug, Clone)]
pub struct NematicRecovery {
    pub ubar: [f64; 2],
    pub qbar: SymTensor3,
    pub h: HApprox,
    pub theta: Cutoff,
    pub scaling: ScalingParams,
    pub laminate: Option<Arc<GrainLaminate>>,
}

impl NematicRecovery {
    pub fn y(&self, x: [f64; 3]) -> Vector3<f64> {
        let s = self.scaling.fast_scale();
        Vector3::new(x[0] * s[0], x[1] * s[1], x[2] * s[2])
    }

    fn w_and_grad(&self, x: [f64; 3]) -> (Vector3<f64>, Matrix3<f64>) {
        let Some(lam) = &self.laminate else {
            return (Vector3::zeros(), Matrix3::zeros());
        };
        let sc = &self.scaling;
        let (_, g, gy) = lam.periodic(&self.y(x));
        let mult = [sc.eta, sc.eta, sc.eta * sc.epsilon * sc.epsilon];
        let c = sc.fast_scale();
        let w = Vector3::new(mult[0] * g[0], mult[1] * g[1], mult[2] * g[2]);
        let dw = Matrix3::from_fn(|i, j| mult[i] * gy[(i, j)] * c[j]);
        (w, dw)
    }
}

impl Field3D for NematicRecovery {
    fn value(&self, x: [f64; 3]) -> Vector3<f64> {
        let s = x[2] + 1.0;
        let e2 = self.scaling.epsilon.powi(2);
        let (w, _) = self.w_and_grad(x);
        let base = Vector3::new(s * self.ubar[0], s * self.ubar[1], s * e2 * self.h.value([x[0], x[1]]));
        base + w * self.theta.value(x)
    }

    fn gradient(&self, x: [f64; 3]) -> Matrix3<f64> {
        let s = x[2] + 1.0;
        let e2 = self.scaling.epsilon.powi(2);
        let p = [x[0], x[1]];
        let dh = self.h.gradient(p);
        let mut d = Matrix3::zeros();
        d[(0, 2)] = self.ubar[0];
        d[(1, 2)] = self.ubar[1];
        d[(2, 0)] = e2 * s * dh[0];
        d[(2, 1)] = e2 * s * dh[1];
        d[(2, 2)] = e2 * self.h.value(p);
        if self.laminate.is_some() {
            let (w, dw) = self.w_and_grad(x);
            let th = self.theta.value(x);
            let dth = Vector3::from(self.theta.gradient(x));
            d += dw * th + w * dth.transpose();
        }
        d
    }

    fn fast_axes(&self) -> [bool; 3] {
        self.laminate.as_ref().map_or([false; 3], |l| l.fast)
    }
}

/// Order tensor of the recovery: mollified laminate or the constant target.
#[derive(Debug, Clone)]
pub enum RecoveryQ {
    Laminate { laminate: Arc<GrainLaminate>, fast_scale: [f64; 3] },
    Constant(SymTensor3),
}

impl TensorField for RecoveryQ {
    fn sample(&self, x: [f64; 3]) -> SymTensor3 {
        match self {
            RecoveryQ::Laminate { laminate, fast_scale: s } => {
                laminate.q_smooth(&Vector3::new(x[0] * s[0], x[1] * s[1], x[2] * s[2]))
            }
            RecoveryQ::Constant(q) => *q,
        }
    }

    fn fast_axes(&self) -> [bool; 3] {
        match self {
            RecoveryQ::Laminate { laminate, .. } => laminate.fast,
            RecoveryQ::Constant(_) => [false; 3],
        }
    }
}

pub fn build_recovery_nematic(
    ubar: [f64; 2],
    qbar: &QTensor,
    grain: &Grain,
    scaling: &ScalingParams,
    m: &MaterialParams,
    model: Model,
) -> Result<(NematicRecovery, RecoveryQ), Energy3dError> {
    scaling.validate()?;
    let (lo, hi) = grain.bonding_box();
    let theta = cutoff_theta(lo, hi, scaling.rho)?;
    let h = build_h_approximant(ScalarTarget::Constant(optimal_k33_nematic(qbar.get(2, 2), m)), grain, scaling.epsilon);
    let (laminate, q) = match model {
        Model::Uniaxial => {
            let lam = Arc::new(GrainLaminate::new(qbar, scaling.delta / scaling.eta)?);
            (Some(lam.clone()), RecoveryQ::Laminate { laminate: lam, fast_scale: scaling.fast_scale() })
        }
        Model::Biaxial => (None, RecoveryQ::Constant(*qbar.sym())),
    };
    Ok((NematicRecovery { ubar, qbar: *qbar.sym(), h, theta, scaling: *scaling, laminate }, q))
}
