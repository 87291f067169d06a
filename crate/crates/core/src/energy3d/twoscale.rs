use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use nalgebra::Vector3;
use rayon::prelude::*;

use super::fields::{build_recovery_film, build_recovery_nematic, Field3D, Grain, GrainLaminate, Model, NematicRecovery, PlanarTarget};
use super::scaling::{LadderOverrides, ScalingParams};
use super::strain::{film_energy_density, rescaled_strain_film};
use super::Energy3dError;
use crate::effective::{film_density, optimal_Qbar, PlanarStrain};
use crate::microstructure::LaminateCase;
use crate::qtensor::{MaterialParams, QTensor, SymTensor3};

/// Gauss-Legendre points per smooth piece of the slow quadrature.
pub const SLOW_POINTS: usize = 10;

/// Averages over one period of the fast variable, in world coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CellMoments {
    pub qn: SymTensor3,
    pub qm: SymTensor3,
    pub qn2: f64,
    pub qm2: f64,
    pub qnqm: f64,
    pub g: [f64; 3],
    pub gg: [[f64; 3]; 3],
    pub gqn: [SymTensor3; 3],
    pub gqm: [SymTensor3; 3],
    /// `<|grad_y Q_m|^2>`.
    pub dq2: f64,
    pub g_sup: f64,
}

impl CellMoments {
    /// Moments of a constant order tensor with no oscillating displacement.
    pub fn constant(q: &SymTensor3) -> Self {
        let q2 = q.frob_norm_sq();
        Self {
            qn: *q,
            qm: *q,
            qn2: q2,
            qm2: q2,
            qnqm: q2,
            g: [0.0; 3],
            gg: [[0.0; 3]; 3],
            gqn: [SymTensor3::ZERO; 3],
            gqm: [SymTensor3::ZERO; 3],
            dq2: 0.0,
            g_sup: 0.0,
        }
    }

    /// Midpoint averages over a fundamental rectangle with spacing at most
    /// `spacing` (in fast units).
    pub fn compute(lam: &GrainLaminate, spacing: f64) -> Self {
        let l = lam.laminate();
        let (lo, ext) = l.fundamental_rect();
        let n1 = match l.case() {
            LaminateCase::Generic => (ext[0] / spacing).ceil() as usize,
            LaminateCase::Degenerate => 1,
        };
        let n3 = (ext[1] / spacing).ceil() as usize;
        let (h1, h3) = (ext[0] / n1 as f64, ext[1] / n3 as f64);
        let fd = 0.25 * h3.min(h1);
        let r = lam.rotation;
        let acc = (0..n3)
            .into_par_iter()
            .map(|k| {
                let mut a = Accum::default();
                let z3 = lo[1] + (k as f64 + 0.5) * h3;
                for i in 0..n1 {
                    let z1 = lo[0] + (i as f64 + 0.5) * h1;
                    let y = r * Vector3::new(z1, 0.0, z3);
                    let (kind, g, _) = lam.periodic(&y);
                    let qn = lam.q_world[kind - 1];
                    let qm = lam.q_smooth(&y);
                    let mut dq2 = 0.0;
                    let axes: &[usize] = if n1 == 1 { &[2] } else { &[0, 2] };
                    for &ax in axes {
                        let mut e = Vector3::zeros();
                        e[ax] = fd;
                        let d = lam.q_smooth(&(y + r * e)) - lam.q_smooth(&(y - r * e));
                        dq2 += d.frob_norm_sq() / (4.0 * fd * fd);
                    }
                    a.add(&qn, &qm, &g, dq2);
                }
                a
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(Accum::default(), Accum::merge);
        acc.finish((n1 * n3) as f64)
    }
}

#[derive(Default, Clone)]
struct Accum {
    qn: SymTensor3,
    qm: SymTensor3,
    qn2: f64,
    qm2: f64,
    qnqm: f64,
    g: [f64; 3],
    gg: [[f64; 3]; 3],
    gqn: [SymTensor3; 3],
    gqm: [SymTensor3; 3],
    dq2: f64,
    g_sup: f64,
}

impl Accum {
    fn add(&mut self, qn: &SymTensor3, qm: &SymTensor3, g: &Vector3<f64>, dq2: f64) {
        self.qn = self.qn + *qn;
        self.qm = self.qm + *qm;
        self.qn2 += qn.frob_norm_sq();
        self.qm2 += qm.frob_norm_sq();
        self.qnqm += qn.dot(qm);
        for k in 0..3 {
            self.g[k] += g[k];
            for l in 0..3 {
                self.gg[k][l] += g[k] * g[l];
            }
            self.gqn[k] = self.gqn[k] + *qn * g[k];
            self.gqm[k] = self.gqm[k] + *qm * g[k];
        }
        self.dq2 += dq2;
        self.g_sup = self.g_sup.max(g.norm());
    }

    fn merge(mut self, o: Accum) -> Accum {
        self.qn = self.qn + o.qn;
        self.qm = self.qm + o.qm;
        self.qn2 += o.qn2;
        self.qm2 += o.qm2;
        self.qnqm += o.qnqm;
        for k in 0..3 {
            self.g[k] += o.g[k];
            for l in 0..3 {
                self.gg[k][l] += o.gg[k][l];
            }
            self.gqn[k] = self.gqn[k] + o.gqn[k];
            self.gqm[k] = self.gqm[k] + o.gqm[k];
        }
        self.dq2 += o.dq2;
        self.g_sup = self.g_sup.max(o.g_sup);
        self
    }

    fn finish(self, n: f64) -> CellMoments {
        let s = 1.0 / n;
        CellMoments {
            qn: self.qn * s,
            qm: self.qm * s,
            qn2: self.qn2 * s,
            qm2: self.qm2 * s,
            qnqm: self.qnqm * s,
            g: self.g.map(|v| v * s),
            gg: self.gg.map(|r| r.map(|v| v * s)),
            gqn: self.gqn.map(|t| t * s),
            gqm: self.gqm.map(|t| t * s),
            dq2: self.dq2 * s,
            g_sup: self.g_sup,
        }
    }
}

/// Rescaled strain of `grad(theta) (x) w` divided by `eta`, for `w = (eta g', eta eps^2 g_3)`.
pub fn cutoff_strain(dtheta: [f64; 3], g: [f64; 3], eps: f64) -> SymTensor3 {
    let [t1, t2, t3] = dtheta;
    SymTensor3 {
        a11: eps * g[0] * t1,
        a22: eps * g[1] * t2,
        a12: 0.5 * eps * (g[0] * t2 + g[1] * t1),
        a13: 0.5 * (eps * g[2] * t1 + g[0] * t3),
        a23: 0.5 * (eps * g[2] * t2 + g[1] * t3),
        a33: g[2] * t3,
    }
}

/// Slow fields of the bonding recovery at one point.
#[derive(Debug, Clone, Copy)]
pub struct SlowState {
    pub theta: f64,
    pub dtheta: [f64; 3],
    pub h: f64,
    pub dh: [f64; 2],
    /// `x3 + 1`.
    pub s: f64,
}

/// Fast-averaged bonding density, Frank term included.
pub fn averaged_density(
    st: &SlowState,
    ubar: [f64; 2],
    qbar: &SymTensor3,
    mo: &CellMoments,
    sc: &ScalingParams,
    m: &MaterialParams,
) -> f64 {
    let eps = sc.epsilon;
    let eta = sc.eta;
    let th = st.theta;
    let k0 = SymTensor3 {
        a11: 0.0,
        a22: 0.0,
        a12: 0.0,
        a13: 0.5 * (eps * st.s * st.dh[0] + ubar[0]),
        a23: 0.5 * (eps * st.s * st.dh[1] + ubar[1]),
        a33: st.h,
    };
    let c = k0 - *qbar * th;
    let mk: [SymTensor3; 3] = std::array::from_fn(|k| {
        let mut e = [0.0; 3];
        e[k] = 1.0;
        cutoff_strain(st.dtheta, e, eps)
    });
    let mut sq = c.frob_norm_sq() + th * th * mo.qn2 + mo.qm2 - 2.0 * th * mo.qnqm + 2.0 * th * c.dot(&mo.qn)
        - 2.0 * c.dot(&mo.qm);
    let mut tr2 = st.h * st.h;
    for k in 0..3 {
        sq += 2.0 * eta * (c.dot(&mk[k]) * mo.g[k] + th * mk[k].dot(&mo.gqn[k]) - mk[k].dot(&mo.gqm[k]));
        tr2 += 2.0 * eta * st.h * mk[k].trace() * mo.g[k];
        for l in 0..3 {
            sq += eta * eta * mk[k].dot(&mk[l]) * mo.gg[k][l];
            tr2 += eta * eta * mk[k].trace() * mk[l].trace() * mo.gg[k][l];
        }
    }
    let frank = (sc.delta_eps / eta).powi(2) * mo.dq2;
    0.5 * (sq + m.trace_coeff() * tr2 + frank)
}

/// Gauss-Legendre nodes and weights over a sorted list of breakpoints.
pub fn piecewise_nodes(breaks: &[f64], points: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(points).expect("nonzero"));
    let mut out = Vec::new();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a <= 0.0 {
            continue;
        }
        for &(x, wt) in rule.as_node_weight_pairs() {
            out.push((0.5 * (a + b) + 0.5 * (b - a) * x, 0.5 * (b - a) * wt));
        }
    }
    out
}

fn merged(a: Vec<f64>, b: Vec<f64>) -> Vec<f64> {
    let mut v = [a, b].concat();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|x, y| (*x - *y).abs() <= 1e-15);
    v
}

/// Target of a single-grain recovery.
#[derive(Debug, Clone, PartialEq)]
pub enum QbarChoice {
    /// Pointwise minimizer of the foundation term for `ubar`.
    Optimal,
    Given(QTensor),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrainTarget {
    pub grain: Grain,
    pub ubar: [f64; 2],
    pub qbar: QbarChoice,
}

impl GrainTarget {
    pub fn qbar(&self, m: &MaterialParams) -> Result<QTensor, Energy3dError> {
        Ok(match &self.qbar {
            QbarChoice::Optimal => optimal_Qbar(self.ubar, m)?,
            QbarChoice::Given(q) => *q,
        })
    }
}

/// Two-scale evaluation of the recovery energy of one grain.
#[derive(Debug, Clone, PartialEq)]
pub struct CellEnergy {
    /// Limit bonding density on the grain interior.
    pub bulk: f64,
    /// Per-volume excess from the mollification layers, exact on the interior.
    pub layer: f64,
    /// Per-volume Frank term.
    pub curvature: f64,
    pub film: f64,
    pub bonding: f64,
    /// Limit energy of the grain (film plus bonding).
    pub limit: f64,
    /// `[rho delta_eps^2/(delta eta), rho, eta^2/rho, delta/eta]`.
    pub terms: [f64; 4],
    /// Constant per bracket term, each from a bound on its contribution.
    pub constants: [f64; 4],
    pub moments: CellMoments,
}

impl CellEnergy {
    pub fn total(&self) -> f64 {
        self.film + self.bonding
    }

    pub fn gap(&self) -> f64 {
        self.total() - self.limit
    }

    pub fn constant(&self) -> f64 {
        self.constants.iter().copied().fold(0.0, f64::max)
    }

    /// `C (sum of terms)` with the constant measured at this scale.
    pub fn bracket(&self) -> f64 {
        self.constant() * self.terms.iter().sum::<f64>()
    }
}

fn moment_spacing(sc: &ScalingParams) -> f64 {
    (sc.delta / sc.eta / 16.0).min(1.0 / 128.0)
}

pub fn periodic_cell_energy(
    target: &GrainTarget,
    sc: &ScalingParams,
    m: &MaterialParams,
    model: Model,
) -> Result<CellEnergy, Energy3dError> {
    let qbar_t = target.qbar(m)?;
    let qbar = *qbar_t.sym();
    let grain = &target.grain;
    let (rec, _) = build_recovery_nematic(target.ubar, &qbar_t, grain, sc, m, model)?;
    let moments = match &rec.laminate {
        Some(lam) => CellMoments::compute(lam, moment_spacing(sc)),
        None => CellMoments::constant(&qbar),
    };
    let eps = sc.epsilon;
    let h_star = match rec.h.target {
        super::fields::ScalarTarget::Constant(c) => c,
        super::fields::ScalarTarget::Affine { c0, .. } => c0,
    };
    let interior = SlowState { theta: 1.0, dtheta: [0.0; 3], h: h_star, dh: [0.0; 2], s: 0.5 };
    let k0 = SymTensor3 { a13: 0.5 * target.ubar[0], a23: 0.5 * target.ubar[1], a33: h_star, ..SymTensor3::ZERO };
    let bulk = 0.5 * ((k0 - qbar).frob_norm_sq() + m.trace_coeff() * h_star * h_star);
    let curvature = 0.5 * (sc.delta_eps / sc.eta).powi(2) * moments.dq2;
    let layer = averaged_density(&interior, target.ubar, &qbar, &moments, sc, m) - bulk - curvature;

    let (lo, hi) = grain.bonding_box();
    let bx: Vec<Vec<(f64, f64)>> = (0..3)
        .map(|k| {
            let mut b = rec.theta.axes[k].breakpoints();
            if k < 2 {
                b = merged(b, rec.h.collar[k].breakpoints());
            }
            piecewise_nodes(&b, SLOW_POINTS)
        })
        .collect();
    let inner = bulk + layer + curvature;
    let h_w = eps.sqrt();
    let in_lo = [lo[0] + sc.rho.max(h_w), lo[1] + sc.rho.max(h_w), lo[2] + sc.rho];
    let in_hi = [hi[0] - sc.rho.max(h_w), hi[1] - sc.rho.max(h_w), hi[2] - sc.rho];
    let slabs: Vec<(f64, f64, f64)> = bx[0]
        .par_iter()
        .map(|&(x1, w1)| {
            let (mut acc, mut acc_l) = (0.0, 0.0);
            let mut sup: f64 = 0.0;
            for &(x2, w2) in &bx[1] {
                for &(x3, w3) in &bx[2] {
                    let x = [x1, x2, x3];
                    let st = slow_state(&rec, x);
                    let d = averaged_density(&st, target.ubar, &qbar, &moments, sc, m);
                    let flat = SlowState { dtheta: [0.0; 3], ..st };
                    let d0 = averaged_density(&flat, target.ubar, &qbar, &moments, sc, m);
                    let w = w1 * w2 * w3;
                    acc += w * d;
                    acc_l += w * (d - d0);
                    let inside = (0..3).all(|k| x[k] >= in_lo[k] && x[k] <= in_hi[k]);
                    if !inside {
                        sup = sup.max((d - inner).abs());
                    }
                }
            }
            (acc, acc_l, sup)
        })
        .collect();
    let bonding: f64 = slabs.iter().map(|s| s.0).sum();
    let cutoff_part: f64 = slabs.iter().map(|s| s.1).sum();
    let sup_excess = slabs.iter().map(|s| s.2).fold(0.0, f64::max);

    let film_rec = build_recovery_film(PlanarTarget::Constant(target.ubar), qbar.a33, grain, eps, m);
    let film = film_energy(&film_rec, grain, sc, m);
    let area = grain.area();
    let film_limit = 0.5 * area * film_density(&PlanarStrain::default(), m);
    let limit = film_limit + area * bulk;

    let vol = area;
    let in_vol: f64 = (0..3).map(|k| (in_hi[k] - in_lo[k]).max(0.0)).product();
    let collar_vol = vol - in_vol;
    let terms = sc.bracket_terms();
    let b_rho = sup_excess * collar_vol + (film - film_limit).abs();
    let b_eta = cutoff_part.abs();
    let b_layer = vol * layer.abs();
    let b_curv = vol * curvature;
    let constants = [b_curv / terms[0], b_rho / terms[1], b_eta / terms[2], b_layer / terms[3]];
    Ok(CellEnergy { bulk, layer, curvature, film, bonding, limit, terms, constants, moments })
}

fn slow_state(rec: &NematicRecovery, x: [f64; 3]) -> SlowState {
    SlowState {
        theta: rec.theta.value(x),
        dtheta: rec.theta.gradient(x),
        h: rec.h.value([x[0], x[1]]),
        dh: rec.h.gradient([x[0], x[1]]),
        s: x[2] + 1.0,
    }
}

/// Film energy of the smooth film recovery by piecewise Gauss-Legendre.
pub fn film_energy(film: &dyn FilmLike, grain: &Grain, sc: &ScalingParams, m: &MaterialParams) -> f64 {
    let bx: Vec<Vec<(f64, f64)>> = (0..2)
        .map(|k| piecewise_nodes(&film.breakpoints(k, grain), SLOW_POINTS))
        .chain(std::iter::once(piecewise_nodes(&[0.0, 1.0], SLOW_POINTS)))
        .collect();
    let mut acc = 0.0;
    for &(x1, w1) in &bx[0] {
        for &(x2, w2) in &bx[1] {
            for &(x3, w3) in &bx[2] {
                let g = film.grad_at([x1, x2, x3]);
                acc += w1 * w2 * w3 * film_energy_density(&rescaled_strain_film(&g, sc.epsilon), m);
            }
        }
    }
    acc
}

/// Film fields whose profile is piecewise polynomial between known breakpoints.
pub trait FilmLike {
    fn grad_at(&self, x: [f64; 3]) -> nalgebra::Matrix3<f64>;
    fn breakpoints(&self, axis: usize, grain: &Grain) -> Vec<f64>;
}

impl FilmLike for super::fields::FilmRecovery {
    fn grad_at(&self, x: [f64; 3]) -> nalgebra::Matrix3<f64> {
        self.gradient(x)
    }

    fn breakpoints(&self, axis: usize, _grain: &Grain) -> Vec<f64> {
        merged(self.h.collar[axis].breakpoints(), self.hhat.collar[axis].breakpoints())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    /// Limit bonding energy of the grain interior density times the grain volume.
    pub bulk: f64,
    pub bracket: f64,
    pub film: f64,
    pub total: f64,
    pub e0: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// Bracket constant: largest per-term constant over the sweep.
    pub constant: f64,
    pub cells: Vec<CellEnergy>,
}

pub fn gamma_sweep(
    target: &GrainTarget,
    eps: &[f64],
    m: &MaterialParams,
    model: Model,
) -> Result<SweepTable, Energy3dError> {
    gamma_sweep_with(target, eps, LadderOverrides::default(), m, model)
}

/// Sweep with ladder entries pinned to the given values at every `eps`.
pub fn gamma_sweep_with(
    target: &GrainTarget,
    eps: &[f64],
    overrides: LadderOverrides,
    m: &MaterialParams,
    model: Model,
) -> Result<SweepTable, Energy3dError> {
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Energy3dError::InvalidScaling("epsilon list must be strictly decreasing".into()));
    }
    let cells = eps
        .iter()
        .map(|&e| periodic_cell_energy(target, &ScalingParams::with_overrides(e, overrides)?, m, model))
        .collect::<Result<Vec<_>, _>>()?;
    let constant = cells.iter().map(CellEnergy::constant).fold(0.0, f64::max);
    let rows = eps
        .iter()
        .zip(&cells)
        .map(|(&e, c)| SweepRow {
            epsilon: e,
            bulk: c.bulk * target.grain.area(),
            bracket: constant * c.terms.iter().sum::<f64>(),
            film: c.film,
            total: c.total(),
            e0: c.limit,
            gap: c.gap(),
        })
        .collect();
    Ok(SweepTable { rows, constant, cells })
}
