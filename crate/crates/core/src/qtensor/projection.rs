use super::eig::{eig_sym3, reassemble};
use super::{MaterialParams, QTensor, QTensorError, SymTensor3};

pub const LAMBDA_MIN: f64 = -1.0 / 3.0;
pub const LAMBDA_MAX: f64 = 2.0 / 3.0;

/// Default tolerances.
pub const MEMBERSHIP_TOL: f64 = 1e-8;
pub const PROJECTION_TOL: f64 = 1e-8;
pub const PG_MAX_ITERS: usize = 100_000;

pub fn is_biaxial(q: &QTensor, tol: f64) -> bool {
    let e = eig_sym3(q.sym());
    LAMBDA_MIN - tol <= e.values[0] && e.values[2] <= LAMBDA_MAX + tol
}

pub fn is_uniaxial(q: &QTensor, tol: f64) -> bool {
    let e = eig_sym3(q.sym());
    (e.values[2] - LAMBDA_MAX).abs() <= tol && (e.values[0] - LAMBDA_MIN).abs() <= tol
}

fn clip_shift(v: &[f64; 3], t: f64) -> [f64; 3] {
    v.map(|x| (x - t).clamp(LAMBDA_MIN, LAMBDA_MAX))
}

/// -1 clamped low, 0 free, 1 clamped high.
fn classify(v: &[f64; 3], t: f64) -> [i8; 3] {
    v.map(|x| {
        let y = x - t;
        if y <= LAMBDA_MIN {
            -1
        } else if y >= LAMBDA_MAX {
            1
        } else {
            0
        }
    })
}

/// Euclidean projection of `v` onto `{x : sum x = 0, -1/3 <= x_i <= 2/3}`.
///
/// Bisection on the multiplier `t` of the sum constraint. The clipped sum is
/// piecewise linear in `t`; once the bracket holds no breakpoint the active
/// set is known and `t` is solved for exactly on the free coordinates.
pub fn project_eigenvalues_polytope(v: [f64; 3]) -> [f64; 3] {
    let sum = |t: f64| clip_shift(&v, t).iter().sum::<f64>();
    let vmin = v.iter().copied().fold(f64::INFINITY, f64::min);
    let vmax = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut lo, mut hi) = (vmin - LAMBDA_MAX, vmax - LAMBDA_MIN);
    for _ in 0..200 {
        if classify(&v, lo) == classify(&v, hi) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sum(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let mut best = clip_shift(&v, t);
    let mut free_sum = 0.0;
    let mut clamped_sum = 0.0;
    let mut nfree = 0usize;
    for (i, c) in classify(&v, t).iter().enumerate() {
        match c {
            -1 => clamped_sum += LAMBDA_MIN,
            1 => clamped_sum += LAMBDA_MAX,
            _ => {
                free_sum += v[i];
                nfree += 1;
            }
        }
    }
    if nfree > 0 {
        let t_exact = (free_sum + clamped_sum) / nfree as f64;
        let cand = clip_shift(&v, t_exact);
        if cand.iter().sum::<f64>().abs() <= best.iter().sum::<f64>().abs() {
            best = cand;
        }
    }
    best
}

/// Euclidean (Frobenius) projection onto the biaxial set.
#[allow(non_snake_case)]
pub fn project_QB_euclidean(a: &SymTensor3) -> QTensor {
    let e = eig_sym3(a);
    let p = project_eigenvalues_polytope(e.values);
    QTensor::from_deviatoric(reassemble(&p, &e.frame))
}

/// `sum_{ab} A_ab^2 + 2 sum_a A_a3^2 + lambda/(lambda+2mu) A_33^2`.
pub fn weighted_norm_sq(a: &SymTensor3, m: &MaterialParams) -> f64 {
    a.a11 * a.a11
        + a.a22 * a.a22
        + 2.0 * a.a12 * a.a12
        + 2.0 * (a.a13 * a.a13 + a.a23 * a.a23)
        + m.weight33() * a.a33 * a.a33
}

/// Inner solver used by [`project_QB_weighted_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightedSolver {
    /// Projected gradient with step `1/L`, `L = 2`.
    #[default]
    ProjectedGradient,
    /// Root find on the scalar multiplier of the `33` entry; each evaluation
    /// is one Euclidean projection. Used on hot paths.
    ScalarMultiplier,
}

/// One projected-gradient step from `q`.
fn pg_step(a: &SymTensor3, q: &SymTensor3, w33: f64) -> SymTensor3 {
    let mut y = *a;
    y.a33 = q.a33 + w33 * (a.a33 - q.a33);
    project_QB_euclidean(&y).into_sym()
}

/// Norm of the gradient mapping `L (Q - P(Q - grad/L))`.
pub fn weighted_optimality_residual(a: &SymTensor3, q: &QTensor, m: &MaterialParams) -> f64 {
    let next = pg_step(a, q.sym(), m.weight33());
    2.0 * (*q.sym() - next).frob_norm()
}

#[allow(non_snake_case)]
pub fn project_QB_weighted(
    a: &SymTensor3,
    m: &MaterialParams,
    tol: f64,
) -> Result<QTensor, QTensorError> {
    project_QB_weighted_with(a, m, tol, WeightedSolver::ProjectedGradient)
}

/// Minimizer of `weighted_norm_sq(A - Q)` over the biaxial set.
#[allow(non_snake_case)]
pub fn project_QB_weighted_with(
    a: &SymTensor3,
    m: &MaterialParams,
    tol: f64,
    solver: WeightedSolver,
) -> Result<QTensor, QTensorError> {
    if !a.is_finite() {
        return Err(QTensorError::NonFinite);
    }
    let tol = tol.max(0.0);
    match solver {
        WeightedSolver::ProjectedGradient => projected_gradient(a, m, tol),
        WeightedSolver::ScalarMultiplier => {
            let q = scalar_multiplier(a, m);
            let residual = weighted_optimality_residual(a, &q, m);
            if residual > tol {
                // fall back to the certified iteration started at the candidate
                return projected_gradient_from(a, m, tol, *q.sym());
            }
            Ok(q)
        }
    }
}

fn projected_gradient(a: &SymTensor3, m: &MaterialParams, tol: f64) -> Result<QTensor, QTensorError> {
    let start = project_QB_euclidean(a).into_sym();
    projected_gradient_from(a, m, tol, start)
}

fn projected_gradient_from(
    a: &SymTensor3,
    m: &MaterialParams,
    tol: f64,
    start: SymTensor3,
) -> Result<QTensor, QTensorError> {
    let w33 = m.weight33();
    let mut q = start;
    let mut residual = f64::INFINITY;
    for _ in 0..PG_MAX_ITERS {
        let next = pg_step(a, &q, w33);
        residual = 2.0 * (q - next).frob_norm();
        q = next;
        if residual <= tol {
            return Ok(QTensor::from_deviatoric(q));
        }
    }
    Err(QTensorError::NoConvergence { iterations: PG_MAX_ITERS, residual })
}

/// `dist_W^2(A, Q_B) = min_k dist_F^2(A - k e3e3, Q_B) + lambda/(2mu) k^2`;
/// the derivative in `k` is monotone, so a bracketed Illinois iteration finds
/// the multiplier and the minimizer is the Euclidean projection at that shift.
fn scalar_multiplier(a: &SymTensor3, m: &MaterialParams) -> QTensor {
    let beta = m.trace_coeff();
    let shifted = |k: f64| {
        let mut y = *a;
        y.a33 -= k;
        y
    };
    // half derivative of the reduced objective
    let dg = |k: f64| {
        let y = shifted(k);
        let p = project_QB_euclidean(&y);
        -(y.a33 - p.sym().a33) + beta * k
    };
    // dg has slope in [beta, 1 + beta], which brackets the root from dg(0)
    let f0 = dg(0.0);
    if f0 == 0.0 {
        return project_QB_euclidean(a);
    }
    let (k_near, k_far) = (-f0 / (1.0 + beta), -f0 / beta);
    let (mut lo, mut hi) = if f0 > 0.0 { (k_far, k_near) } else { (k_near, k_far) };
    let (mut flo, mut fhi) = (dg(lo), dg(hi));
    let scale = 1.0 + a.frob_norm();
    let mut k = if flo.abs() < fhi.abs() { lo } else { hi };
    if flo > 0.0 || fhi < 0.0 {
        // rounding at a bracket end; that end is the root to working precision
        return project_QB_euclidean(&shifted(k));
    }
    let mut side = 0i8;
    for _ in 0..200 {
        if flo == 0.0 {
            k = lo;
            break;
        }
        if fhi == 0.0 {
            k = hi;
            break;
        }
        let mut c = (lo * fhi - hi * flo) / (fhi - flo);
        if !(c > lo && c < hi) {
            c = 0.5 * (lo + hi);
        }
        let fc = dg(c);
        let moved = (c - k).abs();
        k = c;
        if fc.abs() <= 1e-15 * scale || moved <= 1e-15 * scale || (hi - lo) <= 1e-15 * scale {
            break;
        }
        if fc > 0.0 {
            hi = c;
            fhi = fc;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        } else {
            lo = c;
            flo = fc;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        }
    }
    project_QB_euclidean(&shifted(k))
}

pub fn dist2_weighted(a: &SymTensor3, m: &MaterialParams) -> Result<f64, QTensorError> {
    dist2_weighted_with(a, m, PROJECTION_TOL, WeightedSolver::ProjectedGradient)
}

pub fn dist2_weighted_with(
    a: &SymTensor3,
    m: &MaterialParams,
    tol: f64,
    solver: WeightedSolver,
) -> Result<f64, QTensorError> {
    let q = project_QB_weighted_with(a, m, tol, solver)?;
    Ok(weighted_norm_sq(&(*a - *q.sym()), m))
}
