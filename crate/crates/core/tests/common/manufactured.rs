//! Smooth displacement vanishing on the boundary of the unit square, with the
//! body force that makes it the minimizer of the film-only energy.

use std::f64::consts::PI;

use gauss_quad::legendre::GaussLegendre;
use nematic_membrane::fem::{Mesh2D, PlanarField};
use nematic_membrane::qtensor::MaterialParams;

fn q(t: f64) -> f64 {
    t * (1.0 - t)
}

fn dq(t: f64) -> f64 {
    1.0 - 2.0 * t
}

pub fn exact(p: [f64; 2]) -> [f64; 2] {
    let [x, y] = p;
    [(PI * x).sin() * (PI * y).sin(), 4.0 * q(x) * q(y)]
}

/// `[[d1u1, d2u1], [d1u2, d2u2]]`.
pub fn exact_gradient(p: [f64; 2]) -> [[f64; 2]; 2] {
    let [x, y] = p;
    [
        [PI * (PI * x).cos() * (PI * y).sin(), PI * (PI * x).sin() * (PI * y).cos()],
        [4.0 * dq(x) * q(y), 4.0 * q(x) * dq(y)],
    ]
}

fn stress(p: [f64; 2], r: f64) -> [[f64; 2]; 2] {
    let g = exact_gradient(p);
    let e12 = 0.5 * (g[0][1] + g[1][0]);
    let tr = g[0][0] + g[1][1];
    [[r * tr + g[0][0], e12], [e12, r * tr + g[1][1]]]
}

/// `-div sigma` by central differences of the closed-form stress.
pub fn force(p: [f64; 2], m: &MaterialParams) -> [f64; 2] {
    let r = m.weight33();
    let h = 1e-5;
    let d = |i: usize| {
        let mut a = p;
        let mut b = p;
        a[i] += h;
        b[i] -= h;
        let (sa, sb) = (stress(a, r), stress(b, r));
        let mut out = [[0.0; 2]; 2];
        for k in 0..2 {
            for l in 0..2 {
                out[k][l] = (sa[k][l] - sb[k][l]) / (2.0 * h);
            }
        }
        out
    };
    let (dx, dy) = (d(0), d(1));
    [-(dx[0][0] + dy[0][1]), -(dx[1][0] + dy[1][1])]
}

/// Energy-norm error `sqrt(int r tr(d)^2 + |d|^2)`, `d = e(u_h) - e(u)`,
/// with a collapsed Gauss rule on every triangle.
pub fn energy_norm_error(mesh: &Mesh2D, u: &PlanarField, m: &MaterialParams) -> f64 {
    let rule = GaussLegendre::new(6.try_into().unwrap());
    let pts = rule.as_node_weight_pairs();
    let r = m.weight33();
    let mut total = 0.0;
    for (e, t) in mesh.triangles.iter().enumerate() {
        let geo = mesh.geometry(e);
        let mut gh = [[0.0; 2]; 2];
        for (a, &n) in t.iter().enumerate() {
            let un = u.node(n);
            for i in 0..2 {
                for j in 0..2 {
                    gh[i][j] += un[i] * geo.grad[a][j];
                }
            }
        }
        let (p0, p1, p2) = (mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]);
        let mut acc = 0.0;
        for &(s, ws) in pts {
            for &(tt, wt) in pts {
                // Duffy map of the square onto the reference triangle
                let xi = 0.5 * (1.0 + s);
                let eta = 0.5 * (1.0 + tt) * (1.0 - xi);
                let jac = 0.25 * (1.0 - xi);
                let x = [
                    p0[0] + xi * (p1[0] - p0[0]) + eta * (p2[0] - p0[0]),
                    p0[1] + xi * (p1[1] - p0[1]) + eta * (p2[1] - p0[1]),
                ];
                let g = exact_gradient(x);
                let d11 = gh[0][0] - g[0][0];
                let d22 = gh[1][1] - g[1][1];
                let d12 = 0.5 * (gh[0][1] + gh[1][0] - g[0][1] - g[1][0]);
                let val = r * (d11 + d22).powi(2) + d11 * d11 + d22 * d22 + 2.0 * d12 * d12;
                acc += ws * wt * jac * val;
            }
        }
        total += acc * 2.0 * geo.area;
    }
    total.sqrt()
}
