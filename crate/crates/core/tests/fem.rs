mod common;

use approx::assert_abs_diff_eq;
use nematic_membrane::effective::foundation_density;
use nematic_membrane::fem::*;
use nematic_membrane::qtensor::MaterialParams;
use rand::Rng;

fn manufactured_solve(n: usize, m: &MaterialParams) -> (Mesh2D, PlanarField) {
    let mesh = Mesh2D::unit_square(n).unwrap();
    let mc = *m;
    let load = LoadSpec::body_force(move |p| common::manufactured::force(p, &mc));
    let opts = SolverOptions { fem: FemOptions { foundation: false, ..Default::default() }, ..Default::default() };
    let bc = BoundarySpec::all(EdgeCondition::constant([0.0, 0.0]));
    let rep = solve_with(&mesh, m, &bc, &load, 1e-10, &opts, None).unwrap();
    (mesh, rep.field)
}

#[test]
fn energy_examples() {
    let m = MaterialParams::unit();
    let mesh = Mesh2D::rectangle(0.0, 2.0, 0.0, 1.0, 6, 4).unwrap();
    let none = LoadSpec::none();
    assert_eq!(assemble_energy(&mesh, &PlanarField::zeros(&mesh), &m, &none).unwrap(), 0.0);
    let f = PlanarField::from_fn(&mesh, |_| [0.6, 0.0]);
    assert!(assemble_energy(&mesh, &f, &m, &none).unwrap().abs() < 1e-14);
    let f = PlanarField::from_fn(&mesh, |_| [1.5, 0.0]);
    let want = mesh.area() * 0.5 * foundation_density([1.5, 0.0], &m).unwrap();
    assert_abs_diff_eq!(assemble_energy(&mesh, &f, &m, &none).unwrap(), want, epsilon = 1e-10);
    let short = PlanarField { values: vec![0.0; 3] };
    assert!(matches!(assemble_energy(&mesh, &short, &m, &none), Err(FemError::MeshMismatch { .. })));
}

#[test]
fn gradient_examples() {
    let m = MaterialParams::unit();
    let mesh = Mesh2D::unit_square(5).unwrap();
    let none = LoadSpec::none();
    let g = gradient(&mesh, &PlanarField::zeros(&mesh), &m, &none).unwrap();
    assert!(g.values.iter().all(|v| *v == 0.0));
    let plateau = PlanarField::from_fn(&mesh, |_| [0.3, -0.4]);
    let g = gradient(&mesh, &plateau, &m, &none).unwrap();
    assert!(g.values.iter().all(|v| v.abs() < 1e-14));
}

#[test]
fn gradient_matches_central_differences() {
    let m = MaterialParams::new(1.4, 0.8).unwrap();
    let mesh = Mesh2D::unit_square(8).unwrap();
    let load = LoadSpec::body_force(|p| [p[1] - 0.5, 0.3 * p[0]]);
    let mut rng = common::rng(3);
    let mut worst = 0.0_f64;
    for _ in 0..10 {
        let mut f = PlanarField::zeros(&mesh);
        f.values.iter_mut().for_each(|v| *v = rng.random_range(-2.0..2.0));
        let g = gradient(&mesh, &f, &m, &load).unwrap();
        let scale = g.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let h = 1e-6;
        for d in 0..f.values.len() {
            let mut up = f.clone();
            let mut dn = f.clone();
            up.values[d] += h;
            dn.values[d] -= h;
            let fd = (assemble_energy(&mesh, &up, &m, &load).unwrap() - assemble_energy(&mesh, &dn, &m, &load).unwrap()) / (2.0 * h);
            worst = worst.max((fd - g.values[d]).abs() / scale);
        }
    }
    assert!(worst <= 1e-6, "relative gradient mismatch {worst:e}");
}

#[test]
fn solve_examples() {
    let m = MaterialParams::unit();
    let mesh = Mesh2D::unit_square(8).unwrap();
    let none = LoadSpec::none();
    let zero = solve(&mesh, &m, &BoundarySpec::all(EdgeCondition::constant([0.0, 0.0])), &none, 1e-10).unwrap();
    assert!(zero.values.iter().all(|v| v.abs() < 1e-14));

    let bc = BoundarySpec::all(EdgeCondition::constant([0.6, 0.0]));
    let rep = solve_with(&mesh, &m, &bc, &none, 1e-10, &SolverOptions::default(), None).unwrap();
    assert!(rep.energy <= 1e-10);
    for k in 0..mesh.node_count() {
        let u = rep.field.node(k);
        assert!((u[0] - 0.6).abs() < 1e-8 && u[1].abs() < 1e-8);
    }

    assert!(matches!(solve(&mesh, &m, &BoundarySpec::free(), &none, 1e-8), Err(FemError::SingularSystem)));
}

#[test]
fn loaded_solve_is_monotone_and_stationary() {
    let m = MaterialParams::unit();
    let mesh = Mesh2D::unit_square(12).unwrap();
    let load = LoadSpec::body_force(|p| [6.0 * (1.0 - p[1]), 2.0 * p[0]]);
    let bc = BoundarySpec { left: EdgeCondition::constant([0.0, 0.0]), ..Default::default() };
    let rep = solve_with(&mesh, &m, &bc, &load, 1e-9, &SolverOptions::default(), None).unwrap();
    assert!(rep.residual <= 1e-9);
    for w in rep.energy_history.windows(2) {
        assert!(w[1] <= w[0] + 1e-13);
    }
    // the foundation is active somewhere, so the soft disc is left
    let max_u = (0..mesh.node_count()).map(|k| rep.field.node(k)).map(|u| u[0].hypot(u[1])).fold(0.0, f64::max);
    assert!(max_u > 2.0 / 3.0);
}

#[test]
fn manufactured_solution_first_order() {
    let m = MaterialParams::unit();
    let mut errs = Vec::new();
    let mut hs = Vec::new();
    for n in [8, 16, 32, 64] {
        let (mesh, u) = manufactured_solve(n, &m);
        errs.push(common::manufactured::energy_norm_error(&mesh, &u, &m));
        hs.push(mesh.h());
    }
    for k in 1..errs.len() {
        let order = (errs[k - 1] / errs[k]).ln() / (hs[k - 1] / hs[k]).ln();
        assert!(order >= 0.9, "observed order {order} ({errs:?})");
    }
}

#[test]
fn energies_form_a_cauchy_sequence() {
    let m = MaterialParams::unit();
    let mut energies = Vec::new();
    for n in [8, 16, 32, 64] {
        let (mesh, u) = manufactured_solve(n, &m);
        let mc = m;
        let load = LoadSpec::body_force(move |p| common::manufactured::force(p, &mc));
        let opts = FemOptions { foundation: false, ..Default::default() };
        energies.push(assemble_energy_with(&mesh, &u, &m, &load, &opts).unwrap());
    }
    let d: Vec<f64> = energies.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    for w in d.windows(2) {
        assert!(w[1] <= 0.5 * w[0], "{d:?}");
    }
}

#[test]
fn export_writes_header_and_rows() {
    let m = MaterialParams::unit();
    let mesh = Mesh2D::unit_square(2).unwrap();
    let f = PlanarField::from_fn(&mesh, |p| [p[0], 0.0]);
    let csv = solution_csv(&f, &mesh, &m).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), SOLUTION_CSV_HEADER);
    assert_eq!(lines.count(), mesh.node_count());
    let bad = std::path::Path::new("/nonexistent-dir/x.csv");
    let err = export_solution(&f, &mesh, &m, bad).unwrap_err();
    assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
}
