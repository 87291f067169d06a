use std::fmt::Write as _;

use nematic_membrane::energy3d::{
    build_recovery_film, build_recovery_nematic, energy_i, gamma_sweep_with, periodic_cell_energy, Grain,
    GrainTarget, PlanarTarget, QbarChoice, Quadrature, ScalingParams,
};
use nematic_membrane::fem::{
    solution_csv, solve_with, BoundarySpec, EdgeCondition, LoadSpec, Mesh2D, SolverOptions,
};
use nematic_membrane::microstructure::{
    build_fn, build_laminate_basis, build_tiling, check_hadamard, diagonalize_target, weak_convergence_report,
    BoxDomain,
};
use nematic_membrane::qtensor::{
    dist2_weighted_with, eig_sym3, project_QB_euclidean, project_QB_weighted_with, project_eigenvalues_polytope,
    reassemble, weighted_optimality_residual, QTensor, SymTensor3, WeightedSolver,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{EdgeSpec, RunConfig};
use crate::svg::{loglog, Series};
use crate::{Artifact, CliError};

pub const PROJECTION_HEADER: &str =
    "index,a11,a22,a33,a12,a13,a23,dist2_weighted,dist2_reference,abs_diff,optimality_residual,euclidean_residual";
pub const BASIS_HEADER: &str = "j,g11,g12,g13,g21,g22,g23,g31,g32,g33,eig1,eig2,eig3";
pub const TILING_HEADER: &str = "n,cells,interfaces,max_second_singular,sup_deviation,weak_error";
pub const HISTORY_HEADER: &str = "iteration,energy";
pub const SWEEP_HEADER: &str = "epsilon,bulk,bracket,film,total,E0,gap";
pub const DIRECT_HEADER: &str = "epsilon,film,bonding,frank,total,twoscale_total,E0,bracket";

fn e(x: f64) -> String {
    format!("{x:.12e}")
}

fn q_of(q: [f64; 5]) -> Result<QTensor, CliError> {
    let [q11, q22, q12, q13, q23] = q;
    Ok(QTensor::new(SymTensor3::new(q11, q22, -q11 - q22, q12, q13, q23))?)
}

pub fn projection(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let s = cfg.projection_scale;
    let m = &cfg.material;
    let mut out = String::from(PROJECTION_HEADER) + "\n";
    for i in 0..cfg.projection_samples {
        let a = SymTensor3::from_array(std::array::from_fn(|_| rng.random_range(-s..s)));
        let fast = dist2_weighted_with(&a, m, 1e-12, WeightedSolver::ScalarMultiplier)?;
        let reference = dist2_weighted_with(&a, m, 1e-12, WeightedSolver::ProjectedGradient)?;
        let q = project_QB_weighted_with(&a, m, 1e-12, WeightedSolver::ScalarMultiplier)?;
        let res = weighted_optimality_residual(&a, &q, m);
        let ed = eig_sym3(&a);
        let want = reassemble(&project_eigenvalues_polytope(ed.values), &ed.frame);
        let eres = project_QB_euclidean(&a).sym().max_abs_diff(&want);
        let [a11, a22, a33, a12, a13, a23] = a.to_array();
        let _ = writeln!(
            out,
            "{i},{},{},{},{},{},{},{},{},{},{},{}",
            e(a11),
            e(a22),
            e(a33),
            e(a12),
            e(a13),
            e(a23),
            e(fast),
            e(reference),
            e((fast - reference).abs()),
            e(res),
            e(eres)
        );
    }
    Ok(vec![Artifact::new("projection_oracle.csv", out)])
}

pub fn microstructure(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let q = q_of(cfg.microstructure_q)?;
    let t = diagonalize_target(&q)?;
    let b = build_laminate_basis(&t);
    let mut basis = String::from(BASIS_HEADER) + "\n";
    for j in 1..=4 {
        let g = &b.g[j - 1];
        let ev = eig_sym3(&b.q(j)).values;
        let row: Vec<String> = (0..3).flat_map(|r| (0..3).map(move |c| (r, c))).map(|(r, c)| e(g[(r, c)])).collect();
        let _ = writeln!(basis, "{j},{},{},{},{}", row.join(","), e(ev[0]), e(ev[1]), e(ev[2]));
    }
    let dom = BoxDomain::cube(1.0)?;
    let win = BoxDomain::new([0.0, -1.0, 0.0], [b.period.unwrap_or(1.0), 1.0, 1.0 / 3.0])?;
    let weak = weak_convergence_report(&q, &cfg.microstructure_n, &win)?;
    let mut tiling_csv = String::from(TILING_HEADER) + "\n";
    let mut sup = Vec::new();
    let mut werr = Vec::new();
    for (&n, w) in cfg.microstructure_n.iter().zip(&weak) {
        let tiling = build_tiling(&t, &b, n, &dom)?;
        let rep = check_hadamard(&b, &tiling)?;
        let f = build_fn(&b, &tiling)?;
        let s = f.sup_deviation();
        let _ = writeln!(
            tiling_csv,
            "{n},{},{},{},{},{}",
            tiling.cells.len(),
            rep.interfaces,
            e(rep.max_second_singular),
            e(s),
            e(w.error)
        );
        sup.push((n as f64, s));
        werr.push((n as f64, w.error));
    }
    let plot = loglog(
        "laminate convergence",
        "n",
        "error",
        &[Series { label: "sup |f_n - Qx|", points: sup }, Series { label: "window average", points: werr }],
    );
    Ok(vec![
        Artifact::new("microstructure_basis.csv", basis),
        Artifact::new("microstructure_convergence.csv", tiling_csv),
        Artifact::new("microstructure_convergence.svg", plot),
    ])
}

fn edge(s: &EdgeSpec) -> EdgeCondition {
    match s {
        EdgeSpec::Free => EdgeCondition::Free,
        EdgeSpec::Fixed(v) => EdgeCondition::constant(*v),
    }
}

pub fn solve_membrane(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let g = &cfg.geometry;
    let mesh = Mesh2D::rectangle(g.x[0], g.x[1], g.y[0], g.y[1], g.nx, g.ny)?;
    let bc = BoundarySpec {
        left: edge(&cfg.boundary[0]),
        right: edge(&cfg.boundary[1]),
        bottom: edge(&cfg.boundary[2]),
        top: edge(&cfg.boundary[3]),
    };
    let f = cfg.load;
    let load = if f == [0.0, 0.0] { LoadSpec::none() } else { LoadSpec::body_force(move |_| f) };
    let opts = SolverOptions { max_iters: cfg.max_iters, ..Default::default() };
    let rep = solve_with(&mesh, &cfg.material, &bc, &load, cfg.tol, &opts, None)?;
    let mut hist = String::from(HISTORY_HEADER) + "\n";
    for (k, v) in rep.energy_history.iter().enumerate() {
        let _ = writeln!(hist, "{k},{}", e(*v));
    }
    Ok(vec![
        Artifact::new("membrane_solution.csv", solution_csv(&rep.field, &mesh, &cfg.material)?),
        Artifact::new("membrane_history.csv", hist),
    ])
}

fn sweep_target(cfg: &RunConfig) -> Result<GrainTarget, CliError> {
    let grain = Grain::new(cfg.geometry.x, cfg.geometry.y)?;
    let qbar = match cfg.sweep.qbar {
        None => QbarChoice::Optimal,
        Some(q) => QbarChoice::Given(q_of(q)?),
    };
    Ok(GrainTarget { grain, ubar: cfg.sweep.ubar, qbar })
}

pub fn gamma_sweep(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let target = sweep_target(cfg)?;
    let tab = gamma_sweep_with(&target, &cfg.sweep.eps, cfg.ladder, &cfg.material, cfg.sweep.model)?;
    let mut csv = String::from(SWEEP_HEADER) + "\n";
    for r in &tab.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            e(r.epsilon),
            e(r.bulk),
            e(r.bracket),
            e(r.film),
            e(r.total),
            e(r.e0),
            e(r.gap)
        );
    }
    let gaps = tab.rows.iter().map(|r| (r.epsilon, r.gap.abs())).collect();
    let brackets = tab.rows.iter().map(|r| (r.epsilon, r.bracket)).collect();
    let plot = loglog(
        "recovery energy gap",
        "epsilon",
        "energy",
        &[Series { label: "gap", points: gaps }, Series { label: "bracket", points: brackets }],
    );
    Ok(vec![Artifact::new("gamma_sweep.csv", csv), Artifact::new("gamma_sweep.svg", plot)])
}

pub fn energy3d_direct(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let target = sweep_target(cfg)?;
    let m = &cfg.material;
    let sc = ScalingParams::with_overrides(cfg.direct.epsilon, cfg.ladder)?;
    let q = target.qbar(m)?;
    let cell = periodic_cell_energy(&target, &sc, m, cfg.sweep.model)?;
    let film = build_recovery_film(PlanarTarget::Constant(target.ubar), q.get(2, 2), &target.grain, sc.epsilon, m);
    let (rec, qf) = build_recovery_nematic(target.ubar, &q, &target.grain, &sc, m, cfg.sweep.model)?;
    let quad = Quadrature { film: cfg.direct.film, bonding: cfg.direct.bonding };
    let d = energy_i(&film, &rec, &qf, &target.grain, &sc, m, &quad)?;
    let mut csv = String::from(DIRECT_HEADER) + "\n";
    let _ = writeln!(
        csv,
        "{},{},{},{},{},{},{},{}",
        e(sc.epsilon),
        e(d.film),
        e(d.bonding),
        e(d.frank),
        e(d.total()),
        e(cell.total()),
        e(cell.limit),
        e(cell.bracket())
    );
    Ok(vec![Artifact::new("energy3d_direct.csv", csv)])
}
