mod common;

use approx::assert_abs_diff_eq;
use common::{loglog_slope, random_biaxial, random_rotation, rng};
use nalgebra::{Matrix3, Vector3};
use nematic_membrane::microstructure::*;
use nematic_membrane::qtensor::{eig_sym3, is_uniaxial, QTensor, SymTensor3};
use proptest::prelude::*;

const THIRD: f64 = 1.0 / 3.0;

fn target_of(q: &QTensor) -> (DiagonalTarget, LaminateBasis) {
    let t = diagonalize_target(q).unwrap();
    let b = build_laminate_basis(&t);
    (t, b)
}

fn diag_q(a: f64, b: f64, c: f64) -> QTensor {
    QTensor::diag(a, b, c).unwrap()
}

fn assert_uniaxial_spectrum(s: &SymTensor3, tol: f64) {
    let e = eig_sym3(s);
    for (got, want) in e.values.iter().zip([-THIRD, -THIRD, 2.0 * THIRD]) {
        assert!((got - want).abs() <= tol, "{:?}", e.values);
    }
}

fn fundamental_box(basis: &LaminateBasis) -> BoxDomain {
    match basis.period {
        Some(t) => BoxDomain::new([-t, -1.0, -1.0], [t, 1.0, 1.0]).unwrap(),
        None => BoxDomain::new([-1.0, -1.0, -2.0], [1.0, 1.0, 2.0]).unwrap(),
    }
}

#[test]
fn diagonalize_examples() {
    let t = diagonalize_target(&QTensor::ZERO).unwrap();
    assert_eq!((t.a, t.b, t.c), (0.0, 0.0, 0.0));
    assert_abs_diff_eq!(t.rotation, Matrix3::identity(), epsilon = 1e-15);

    let t = diagonalize_target(&diag_q(-THIRD, 0.0, THIRD)).unwrap();
    assert_abs_diff_eq!(t.a, -THIRD, epsilon = 1e-15);
    assert_abs_diff_eq!(t.b, 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(t.c, THIRD, epsilon = 1e-15);

    let mut r = rng(3);
    for _ in 0..50 {
        let q = random_biaxial(&mut r);
        let rot = random_rotation(&mut r);
        let q = q.rotate(&rot);
        let t = diagonalize_target(&q).unwrap();
        assert!(t.a <= t.b && t.b <= t.c);
        assert_abs_diff_eq!(t.rotation.determinant(), 1.0, epsilon = 1e-12);
        assert!(t.reconstruct().max_abs_diff(q.sym()) <= 1e-10);
    }
    let bad = QTensor::diag(-0.5, 0.0, 0.5).unwrap();
    assert!(matches!(diagonalize_target(&bad), Err(MicrostructureError::NotBiaxial { .. })));
}

#[test]
fn lamination_period_examples() {
    assert_abs_diff_eq!(lamination_period(0.0, 0.0).unwrap(), 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(lamination_period(-1.0 / 6.0, THIRD).unwrap(), 2.0, epsilon = 1e-14);
    assert!(lamination_period(-THIRD + 1e-6, 0.3).unwrap() > 500.0);
    assert!(matches!(lamination_period(-THIRD, THIRD), Err(MicrostructureError::DegenerateCase { .. })));
    assert!(matches!(lamination_period(-THIRD + 5e-9, THIRD), Err(MicrostructureError::DegenerateCase { .. })));
}

#[test]
fn basis_of_zero_target() {
    let (_, b) = target_of(&QTensor::ZERO);
    assert_eq!(b.case, LaminateCase::Generic);
    for g in [b.gab, b.gac, b.gbc] {
        assert_abs_diff_eq!(g, THIRD, epsilon = 1e-15);
    }
    let s = 2.0 * THIRD;
    let g1 = Matrix3::new(0.0, 0.0, s, -s, 0.0, -s, 0.0, 0.0, 0.0);
    assert_abs_diff_eq!(b.g[0], g1, epsilon = 1e-15);
    assert_abs_diff_eq!(b.mean(), Matrix3::zeros(), epsilon = 1e-15);
    assert_uniaxial_spectrum(&b.q(1), 1e-12);
}

#[test]
fn spectrum_and_mean_identities_on_random_targets() {
    let mut r = rng(11);
    for _ in 0..1000 {
        let q = random_biaxial(&mut r);
        let (t, b) = target_of(&q);
        for j in 1..=4 {
            assert_uniaxial_spectrum(&b.q(j), 1e-10);
        }
        assert!((b.mean() - t.diagonal().to_matrix()).amax() <= 1e-12);
    }
}

#[test]
fn degenerate_basis() {
    let (t, b) = target_of(&diag_q(-THIRD, 0.1, THIRD - 0.1));
    assert_eq!(b.case, LaminateCase::Degenerate);
    assert_eq!(b.period, None);
    for j in 1..=4 {
        assert_uniaxial_spectrum(&b.q(j), 1e-10);
    }
    assert!((b.mean() - t.diagonal().to_matrix()).amax() <= 1e-12);
    assert_eq!(b.g[0], b.g[2]);
    assert_eq!(b.g[1], b.g[3]);
    // near-degenerate stays generic with a large period
    let (_, b) = target_of(&diag_q(-THIRD + 1e-6, 0.1, THIRD - 0.1 - 1e-6));
    assert_eq!(b.case, LaminateCase::Generic);
    assert!(b.period.unwrap() > 100.0);
}

#[test]
fn generic_tiling_geometry() {
    let (t, b) = target_of(&QTensor::ZERO);
    let dom = fundamental_box(&b);
    let tiling = build_tiling(&t, &b, 1, &dom).unwrap();
    assert_abs_diff_eq!(tiling.total_volume(), dom.volume(), epsilon = 1e-12);
    let mut per_kind = [0.0; 4];
    for c in &tiling.cells {
        per_kind[c.id.kind - 1] += c.volume;
    }
    for v in per_kind {
        assert_abs_diff_eq!(v, dom.volume() / 4.0, epsilon = 1e-12);
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for f in &tiling.interfaces {
        let [n1, n2, n3] = f.normal;
        assert_eq!(n2, 0.0);
        let slanted = (n1.abs() - h).abs() < 1e-12 && (n3.abs() - h).abs() < 1e-12;
        let flat = n1.abs() < 1e-12 && (n3.abs() - 1.0).abs() < 1e-12;
        assert!(slanted || flat, "{:?}", f.normal);
    }
    // every pair of adjacent cells differs in type
    for f in &tiling.interfaces {
        assert_ne!(tiling.cells[f.cells.0].id.kind, tiling.cells[f.cells.1].id.kind);
    }
}

#[test]
fn tiling_cell_count_scales_with_frequency() {
    let (t, b) = target_of(&diag_q(-0.2, 0.05, 0.15));
    let dom = BoxDomain::cube(1.0).unwrap();
    let counts: Vec<f64> = [16, 32, 64].iter().map(|&n| build_tiling(&t, &b, n, &dom).unwrap().cells.len() as f64).collect();
    for w in counts.windows(2) {
        let ratio = w[1] / w[0];
        assert!((ratio - 4.0).abs() < 0.5, "ratio {ratio}");
    }
}

#[test]
fn degenerate_tiling_slabs() {
    let (t, b) = target_of(&diag_q(-THIRD, 0.0, THIRD));
    let dom = BoxDomain::new([-1.0, -1.0, -4.0], [1.0, 1.0, 4.0]).unwrap();
    let tiling = build_tiling(&t, &b, 1, &dom).unwrap();
    assert_eq!(tiling.cells.len(), 8);
    for c in &tiling.cells {
        let z3: Vec<f64> = c.polygon.iter().map(|p| p[1]).collect();
        let lo = z3.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = z3.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert_abs_diff_eq!(hi - lo, 1.0, epsilon = 1e-14);
        let expect = [3, 2, 1, 4][((lo + 2.0).rem_euclid(4.0)) as usize];
        assert_eq!(c.id.kind, expect);
    }
    for f in &tiling.interfaces {
        assert_abs_diff_eq!(f.normal[2].abs(), 1.0, epsilon = 1e-15);
    }
    let rep = check_hadamard(&b, &tiling).unwrap();
    assert_eq!(rep.interfaces, 7);
}

#[test]
fn sample_qn_examples() {
    let (t, b) = target_of(&diag_q(-0.2, 0.05, 0.15));
    let dom = fundamental_box(&b);
    let tiling = build_tiling(&t, &b, 1, &dom).unwrap();
    let mut seen = Vec::new();
    for c in &tiling.cells {
        let q = sample_qn(c.centroid, &tiling, &b).unwrap();
        assert!(is_uniaxial(&q, 1e-10));
        assert!(q.sym().max_abs_diff(&b.q(c.id.kind)) < 1e-15);
        if !seen.contains(&c.id.kind) {
            seen.push(c.id.kind);
        }
    }
    assert_eq!(seen.len(), 4);
    for i in 1..=4 {
        for j in 1..i {
            assert!(b.q(i).max_abs_diff(&b.q(j)) > 1e-3);
        }
    }
    assert!(tiling.mean_q().max_abs_diff(&t.diagonal()) <= 1e-10);
    assert!(matches!(sample_qn([5.0, 0.0, 0.0], &tiling, &b), Err(MicrostructureError::OutOfDomain { .. })));
    // the plane z3 = 0 separates types 1 and 3; on it the lower type wins
    let q = sample_qn([0.1, 0.0, 0.0], &tiling, &b).unwrap();
    assert!(q.sym().max_abs_diff(&b.q(1)) < 1e-15);
}

#[test]
fn hadamard_explicit_differences() {
    let (t, b) = target_of(&QTensor::ZERO);
    // G1 - G2 = e2 (x) (-4/3, 0, -4/3): singular values (4 sqrt2 / 3, 0, 0)
    let d = b.g[0] - b.g[1];
    let sv = d.singular_values();
    let mut s: Vec<f64> = sv.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    assert_abs_diff_eq!(s[0], 4.0 * 2f64.sqrt() / 3.0, epsilon = 1e-14);
    assert!(s[1] < 1e-14);
    let nu = Vector3::new(1.0, 0.0, 1.0).normalize();
    assert!((d - d * nu * nu.transpose()).norm() < 1e-14);
    let tiling = build_tiling(&t, &b, 3, &BoxDomain::cube(1.0).unwrap()).unwrap();
    let rep = check_hadamard(&b, &tiling).unwrap();
    assert!(rep.interfaces > 50);
    assert!(rep.max_second_singular <= 1e-10 && rep.max_normal_residual <= 1e-10);

    let mut broken = b.clone();
    broken.g[1][(0, 0)] += 0.1;
    assert!(matches!(check_hadamard(&broken, &tiling), Err(MicrostructureError::IncompatiblePair { .. })));
}

fn sup_sweep(q: &QTensor) -> (f64, f64) {
    let (t, b) = target_of(q);
    let dom = match b.period {
        Some(p) => BoxDomain::new([-p, -1.0, -1.0], [p, 1.0, 1.0]).unwrap(),
        None => BoxDomain::cube(1.0).unwrap(),
    };
    let ns = [4usize, 8, 16, 32, 64];
    let mut sups = Vec::new();
    let mut c_max: f64 = 0.0;
    for &n in &ns {
        let tiling = build_tiling(&t, &b, n, &dom).unwrap();
        let f = build_fn(&b, &tiling).unwrap();
        assert!(f.max_interface_jump() <= 1e-10);
        assert!(f.analytic_offset_error() <= 1e-10, "{}", f.analytic_offset_error());
        let s = f.sup_deviation();
        c_max = c_max.max(s * n as f64);
        sups.push(s);
    }
    let x: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    (loglog_slope(&x, &sups), c_max)
}

#[test]
fn fn_converges_uniformly_at_rate_one() {
    for q in [QTensor::ZERO, diag_q(-0.2, 0.05, 0.15), diag_q(-THIRD, 0.1, THIRD - 0.1)] {
        let (slope, c) = sup_sweep(&q);
        assert!((-1.2..=-0.8).contains(&slope), "slope {slope}");
        assert!(c.is_finite() && c > 0.0);
    }
}

#[test]
fn fn_gradient_matches_sampled_tensor() {
    let (t, b) = target_of(&diag_q(-0.25, 0.1, 0.15));
    let tiling = build_tiling(&t, &b, 2, &BoxDomain::cube(1.0).unwrap()).unwrap();
    let f = build_fn(&b, &tiling).unwrap();
    for (i, c) in tiling.cells.iter().enumerate() {
        // finite-difference gradient of f inside the cell
        let z = Vector3::from(c.centroid);
        let h = 1e-6;
        let mut g = Matrix3::zeros();
        for k in 0..3 {
            let mut e = Vector3::zeros();
            e[k] = h;
            g.set_column(k, &((f.eval_cell(i, &(z + e)) - f.eval_cell(i, &(z - e))) / (2.0 * h)));
        }
        let q = sample_qn(c.centroid, &tiling, &b).unwrap();
        assert!(SymTensor3::sym_of(&g).max_abs_diff(q.sym()) < 1e-8);
    }
}

#[test]
fn weak_convergence_examples() {
    let q = diag_q(-0.2, 0.05, 0.15);
    let (_, b) = target_of(&q);
    let full = fundamental_box(&b);
    for row in weak_convergence_report(&q, &[1, 2, 3, 8], &full).unwrap() {
        assert!(row.error <= 1e-10, "n={} err={}", row.n, row.error);
    }
    let win = BoxDomain::new([0.0, -1.0, 0.0], [1.0, 1.0, THIRD]).unwrap();
    let ns = [4usize, 8, 16, 32, 64];
    let rows = weak_convergence_report(&q, &ns, &win).unwrap();
    let x: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.error).collect();
    let slope = loglog_slope(&x, &y);
    assert!((-1.2..=-0.8).contains(&slope), "slope {slope} {y:?}");

    let tiny = BoxDomain::new([0.1, -0.01, 0.1], [0.11, 0.01, 0.11]).unwrap();
    let row = weak_convergence_report(&q, &[1], &tiny).unwrap()[0];
    let (t, _) = target_of(&q);
    assert_abs_diff_eq!(row.error, (b.q(1) - t.diagonal()).frob_norm(), epsilon = 1e-12);
}

#[test]
fn every_lattice_vertex_touches_all_types() {
    for q in [QTensor::ZERO, diag_q(-0.3, 0.1, 0.2)] {
        let (_, b) = target_of(&q);
        let lam = PeriodicLaminate::new(b);
        let t = lam.basis().period.unwrap();
        for (k1, k3) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (-1.0, 1.0), (2.0, -1.0)] {
            let v = [k1 * t, k3];
            let mut kinds = std::collections::BTreeSet::new();
            for i in 0..720 {
                let a = i as f64 / 720.0 * std::f64::consts::TAU;
                let r = 1e-7;
                kinds.insert(lam.locate(v[0] + r * a.cos(), v[1] + r * a.sin()).kind);
            }
            assert_eq!(kinds.len(), 4, "vertex {v:?}");
        }
    }
}

fn mollified(q: &QTensor, n: usize, delta: f64) -> (Tiling, LaminateBasis, MollifiedField) {
    let (t, b) = target_of(q);
    let tiling = build_tiling(&t, &b, n, &BoxDomain::cube(1.0).unwrap()).unwrap();
    let m = mollify_field(&tiling, delta).unwrap();
    (tiling, b, m)
}

#[test]
fn mollified_field_is_uniaxial_and_matches_off_layers() {
    let mut r = rng(5);
    use rand::Rng;
    for q in [QTensor::ZERO, diag_q(-0.2, 0.05, 0.15), diag_q(-THIRD, 0.1, THIRD - 0.1)] {
        let (tiling, b, m) = mollified(&q, 4, 0.005);
        let mut bulk = 0usize;
        let total = 4000;
        for _ in 0..total {
            let x = [r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)];
            let qm = m.sample(x).unwrap();
            assert!(is_uniaxial(&qm, 1e-8));
            if m.is_bulk(x) {
                bulk += 1;
                let q0 = sample_qn(x, &tiling, &b).unwrap();
                assert!(qm.sym().max_abs_diff(q0.sym()) < 1e-12);
            }
        }
        // layers have volume fraction O(delta n)
        let frac = 1.0 - bulk as f64 / total as f64;
        assert!(frac < 30.0 * 0.005 * 4.0, "layer fraction {frac}");
        assert!(frac > 0.0);
    }
}

#[test]
fn mollified_field_gradient_scales_like_inverse_delta() {
    let mut r = rng(9);
    use rand::Rng;
    for q in [diag_q(-0.2, 0.05, 0.15), diag_q(-THIRD, 0.1, THIRD - 0.1)] {
        let mut products = Vec::new();
        for delta in [1e-2 / 4.0, 1e-3 / 4.0] {
            let (_, _, m) = mollified(&q, 4, delta);
            let h = delta / 10.0;
            let mut worst: f64 = 0.0;
            for _ in 0..3000 {
                let x = [r.random_range(-0.9..0.9), r.random_range(-0.9..0.9), r.random_range(-0.9..0.9)];
                for k in [0, 2] {
                    let mut xp = x;
                    xp[k] += h;
                    let d = (*m.sample(xp).unwrap().sym() - *m.sample(x).unwrap().sym()).frob_norm() / h;
                    worst = worst.max(d);
                }
            }
            products.push(worst * delta);
        }
        for p in &products {
            assert!(*p < 10.0, "{products:?}");
        }
        assert!(products[1] < 3.0 * products[0] + 0.5, "{products:?}");
    }
}

#[test]
fn mollified_field_is_continuous_across_facets() {
    let (tiling, _, m) = mollified(&diag_q(-0.2, 0.05, 0.15), 2, 0.01);
    for f in tiling.interfaces.iter().take(200) {
        let p = f.midpoint();
        let e = 1e-9;
        let a = [p[0] - e * f.normal[0], p[1], p[2] - e * f.normal[2]];
        let c = [p[0] + e * f.normal[0], p[1], p[2] + e * f.normal[2]];
        let d = (*m.sample(a).unwrap().sym() - *m.sample(c).unwrap().sym()).frob_norm();
        assert!(d < 1e-5, "jump {d}");
    }
}

#[test]
fn mollifier_rejects_wide_layers() {
    let (t, b) = target_of(&QTensor::ZERO);
    let tiling = build_tiling(&t, &b, 4, &BoxDomain::cube(1.0).unwrap()).unwrap();
    assert!(matches!(mollify_field(&tiling, 0.1), Err(MicrostructureError::DeltaTooLarge { .. })));
    assert!(matches!(mollify_field(&tiling, 0.0), Err(MicrostructureError::DeltaTooLarge { .. })));
    assert!(mollify_field(&tiling, 0.01).is_ok());
}

fn biaxial_strategy() -> impl Strategy<Value = QTensor> {
    any::<u64>().prop_map(|s| random_biaxial(&mut rng(s)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn tilings_are_compatible_and_fn_continuous(q in biaxial_strategy(), n in 1usize..6) {
        let (t, b) = target_of(&q);
        let dom = BoxDomain::cube(0.7).unwrap();
        let tiling = build_tiling(&t, &b, n, &dom).unwrap();
        prop_assert!((tiling.total_volume() - dom.volume()).abs() <= 1e-12 * dom.volume());
        check_hadamard(&b, &tiling).unwrap();
        let f = build_fn(&b, &tiling).unwrap();
        prop_assert!(f.max_interface_jump() <= 1e-10);
        prop_assert!(f.analytic_offset_error() <= 1e-10);
    }

    #[test]
    fn sampled_tensors_are_uniaxial(q in biaxial_strategy(), x in prop::array::uniform3(-0.99f64..0.99)) {
        let (t, b) = target_of(&q);
        let tiling = build_tiling(&t, &b, 3, &BoxDomain::cube(1.0).unwrap()).unwrap();
        prop_assert!(is_uniaxial(&sample_qn(x, &tiling, &b).unwrap(), 1e-10));
    }
}
