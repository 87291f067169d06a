//! Reference computations that do not go through the library's solvers.

use nematic_membrane::qtensor::SymTensor3;

fn minors_nonneg(m: [[f64; 3]; 3], tol: f64) -> bool {
    let d = |i: usize, j: usize| m[i][i] * m[j][j] - m[i][j] * m[j][i];
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    m[0][0] >= -tol
        && m[1][1] >= -tol
        && m[2][2] >= -tol
        && d(0, 1) >= -tol
        && d(0, 2) >= -tol
        && d(1, 2) >= -tol
        && det >= -tol
}

fn shifted(a: &SymTensor3, s: f64, sign: f64) -> [[f64; 3]; 3] {
    [
        [s + sign * a.a11, sign * a.a12, sign * a.a13],
        [sign * a.a12, s + sign * a.a22, sign * a.a23],
        [sign * a.a13, sign * a.a23, s + sign * a.a33],
    ]
}

/// `2/3 I - Q >= 0` and `Q + 1/3 I >= 0` by principal minors.
pub fn in_biaxial_by_minors(q: &SymTensor3) -> bool {
    minors_nonneg(shifted(q, 2.0 / 3.0, -1.0), 1e-14) && minors_nonneg(shifted(q, 1.0 / 3.0, 1.0), 1e-14)
}

fn weighted(a: &SymTensor3, q: [f64; 5], w33: f64) -> f64 {
    let [q11, q22, q12, q13, q23] = q;
    let q33 = -q11 - q22;
    2.0 * (a.a13 - q13).powi(2)
        + 2.0 * (a.a23 - q23).powi(2)
        + 2.0 * (a.a12 - q12).powi(2)
        + (a.a11 - q11).powi(2)
        + (a.a22 - q22).powi(2)
        + w33 * (a.a33 - q33).powi(2)
}

fn grid(step: f64, lo: f64, hi: f64) -> Vec<f64> {
    let k0 = (lo / step).ceil() as i64;
    let k1 = (hi / step).floor() as i64;
    (k0..=k1).map(|k| k as f64 * step).collect()
}

fn scan(a: &SymTensor3, w33: f64, step: f64, mut best: (f64, [f64; 5])) -> (f64, [f64; 5]) {
    let diag = grid(step, -1.0 / 3.0, 2.0 / 3.0);
    let off = grid(step, -0.5, 0.5);
    for &q13 in &off {
        let p1 = 2.0 * (a.a13 - q13).powi(2);
        if p1 > best.0 {
            continue;
        }
        for &q23 in &off {
            let p2 = p1 + 2.0 * (a.a23 - q23).powi(2);
            if p2 > best.0 {
                continue;
            }
            for &q12 in &off {
                let p3 = p2 + 2.0 * (a.a12 - q12).powi(2);
                if p3 > best.0 {
                    continue;
                }
                for &q11 in &diag {
                    let p4 = p3 + (a.a11 - q11).powi(2);
                    if p4 > best.0 {
                        continue;
                    }
                    for &q22 in &diag {
                        let q = [q11, q22, q12, q13, q23];
                        let f = weighted(a, q, w33);
                        if f >= best.0 {
                            continue;
                        }
                        let cand = SymTensor3::new(q11, q22, -q11 - q22, q12, q13, q23);
                        if in_biaxial_by_minors(&cand) {
                            best = (f, q);
                        }
                    }
                }
            }
        }
    }
    best
}

/// Exhaustive search for the weighted distance to the biaxial set over the
/// chart `(q11, q22, q12, q13, q23)` on a grid of the given step. Branches
/// whose partial sum already exceeds the incumbent are skipped; a coarse pass
/// seeds the incumbent.
pub fn grid_weighted_projection(a: &SymTensor3, w33: f64, step: f64) -> (f64, SymTensor3) {
    let zero = (weighted(a, [0.0; 5], w33), [0.0; 5]);
    let coarse = scan(a, w33, 0.1, zero);
    let (f, q) = scan(a, w33, step, coarse);
    (f, SymTensor3::new(q[0], q[1], -q[0] - q[1], q[2], q[3], q[4]))
}

/// Polytope projection by dense search over the 2-dim slice `x3 = -x1 - x2`,
/// then local refinement with shrinking steps.
pub fn grid_polytope_projection(v: [f64; 3], step: f64) -> [f64; 3] {
    let lo = -1.0 / 3.0;
    let hi = 2.0 / 3.0;
    let feasible = |x1: f64, x2: f64| {
        let x3 = -x1 - x2;
        (lo..=hi).contains(&x1) && (lo..=hi).contains(&x2) && (lo - 1e-15..=hi + 1e-15).contains(&x3)
    };
    let dist = |x1: f64, x2: f64| {
        let x3 = -x1 - x2;
        (v[0] - x1).powi(2) + (v[1] - x2).powi(2) + (v[2] - x3).powi(2)
    };
    let mut best = (f64::INFINITY, 0.0, 0.0);
    let n = ((hi - lo) / step).round() as i64;
    for i in 0..=n {
        for j in 0..=n {
            let (x1, x2) = (lo + i as f64 * step, lo + j as f64 * step);
            if feasible(x1, x2) {
                let d = dist(x1, x2);
                if d < best.0 {
                    best = (d, x1, x2);
                }
            }
        }
    }
    // moves that leave the slice are pulled back onto the nearest face
    let repair = |x1: f64, x2: f64| {
        let x1 = x1.clamp(lo, hi);
        let mut x2 = x2.clamp(lo, hi);
        if -x1 - x2 > hi {
            x2 = -x1 - hi;
        } else if -x1 - x2 < lo {
            x2 = -x1 - lo;
        }
        (x1, x2)
    };
    let mut h = step;
    while h > 1e-14 {
        let mut improved = true;
        while improved {
            improved = false;
            for (dx, dy) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h), (h, -h), (-h, h)] {
                let (x1, x2) = repair(best.1 + dx, best.2 + dy);
                if feasible(x1, x2) {
                    let d = dist(x1, x2);
                    if d < best.0 {
                        best = (d, x1, x2);
                        improved = true;
                    }
                }
            }
        }
        h *= 0.5;
    }
    [best.1, best.2, -best.1 - best.2]
}

/// Golden-section minimization on `[a, b]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}
