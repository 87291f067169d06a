//! Python bindings: order tensors, projections, laminates, the limit
//! membrane model and the recovery-energy sweep.

use nalgebra::Matrix3;
use nematic_membrane::effective;
use nematic_membrane::energy3d::{self, Energy3dError, Grain, GrainTarget, Model, QbarChoice};
use nematic_membrane::fem::{self, FemError};
use nematic_membrane::microstructure::{self as ms, MicrostructureError};
use nematic_membrane::qtensor::{self as qt, QTensorError, SymTensor3};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn q_err(e: QTensorError) -> PyErr {
    match e {
        QTensorError::NoConvergence { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn ms_err(e: MicrostructureError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn e3_err(e: Energy3dError) -> PyErr {
    match e {
        Energy3dError::QTensor(q) => q_err(q),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn fem_err(e: FemError) -> PyErr {
    match e {
        FemError::NoConvergence { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn rows(m: &Matrix3<f64>) -> Vec<Vec<f64>> {
    (0..3).map(|i| (0..3).map(|j| m[(i, j)]).collect()).collect()
}

/// Lamé pair of the model.
#[pyclass(name = "Material", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
pub struct PyMaterial(qt::MaterialParams);

#[pymethods]
impl PyMaterial {
    #[new]
    #[pyo3(signature = (lam = 1.0, mu = 1.0))]
    fn new(lam: f64, mu: f64) -> PyResult<Self> {
        qt::MaterialParams::new(lam, mu).map(Self).map_err(q_err)
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.0.lambda()
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.0.mu()
    }

    fn __repr__(&self) -> String {
        format!("Material(lam={}, mu={})", self.0.lambda(), self.0.mu())
    }
}

/// Symmetric traceless order tensor.
#[pyclass(name = "QTensor", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
pub struct PyQTensor(qt::QTensor);

#[pymethods]
impl PyQTensor {
    /// From the upper triangle `(a11, a22, a33, a12, a13, a23)`.
    #[new]
    fn new(entries: [f64; 6]) -> PyResult<Self> {
        qt::QTensor::new(SymTensor3::from_array(entries)).map(Self).map_err(q_err)
    }

    #[staticmethod]
    fn from_director(n: [f64; 3]) -> PyResult<Self> {
        let d = qt::Director::new(n.into()).map_err(q_err)?;
        Ok(Self(qt::from_director(&d)))
    }

    fn entries(&self) -> [f64; 6] {
        self.0.sym().to_array()
    }

    fn matrix(&self) -> Vec<Vec<f64>> {
        rows(&self.0.to_matrix())
    }

    fn eigenvalues(&self) -> [f64; 3] {
        qt::eig_sym3(self.0.sym()).values
    }

    #[pyo3(signature = (tol = 1e-10))]
    fn is_biaxial(&self, tol: f64) -> bool {
        qt::is_biaxial(&self.0, tol)
    }

    #[pyo3(signature = (tol = 1e-10))]
    fn is_uniaxial(&self, tol: f64) -> bool {
        qt::is_uniaxial(&self.0, tol)
    }

    fn __repr__(&self) -> String {
        format!("QTensor({:?})", self.0.sym().to_array())
    }
}

/// Euclidean projection of a symmetric matrix (upper triangle) onto the biaxial set.
#[pyfunction]
fn project_qb_euclidean(a: [f64; 6]) -> PyQTensor {
    PyQTensor(qt::project_QB_euclidean(&SymTensor3::from_array(a)))
}

#[pyfunction]
#[pyo3(signature = (a, material, tol = 1e-10))]
fn project_qb_weighted(a: [f64; 6], material: &PyMaterial, tol: f64) -> PyResult<PyQTensor> {
    qt::project_QB_weighted(&SymTensor3::from_array(a), &material.0, tol).map(PyQTensor).map_err(q_err)
}

#[pyfunction]
fn dist2_weighted(a: [f64; 6], material: &PyMaterial) -> PyResult<f64> {
    qt::dist2_weighted(&SymTensor3::from_array(a), &material.0).map_err(q_err)
}

#[pyfunction]
fn foundation_density(u: [f64; 2], material: &PyMaterial) -> PyResult<f64> {
    effective::foundation_density(u, &material.0).map_err(q_err)
}

#[pyfunction]
fn optimal_qbar(u: [f64; 2], material: &PyMaterial) -> PyResult<PyQTensor> {
    effective::optimal_Qbar(u, &material.0).map(PyQTensor).map_err(q_err)
}

/// Four-gradient laminate of a biaxial target, in the target's eigenframe.
#[pyclass(name = "Laminate", frozen)]
pub struct PyLaminate {
    target: ms::DiagonalTarget,
    basis: ms::LaminateBasis,
}

#[pymethods]
impl PyLaminate {
    #[new]
    fn new(q: &PyQTensor) -> PyResult<Self> {
        let target = ms::diagonalize_target(&q.0).map_err(ms_err)?;
        let basis = ms::build_laminate_basis(&target);
        Ok(Self { target, basis })
    }

    /// `[a, b, c]` eigenvalues of the target.
    fn diagonal(&self) -> [f64; 3] {
        [self.target.a, self.target.b, self.target.c]
    }

    fn rotation(&self) -> Vec<Vec<f64>> {
        rows(&self.target.rotation)
    }

    /// `None` in the degenerate case.
    #[getter]
    fn period(&self) -> Option<f64> {
        self.basis.period
    }

    fn gradients(&self) -> Vec<Vec<Vec<f64>>> {
        self.basis.g.iter().map(rows).collect()
    }

    fn mean(&self) -> Vec<Vec<f64>> {
        rows(&self.basis.mean())
    }

    /// Interfaces and largest second singular value of the jumps at frequency `n`.
    #[pyo3(signature = (n, half_width = 1.0))]
    fn hadamard(&self, n: usize, half_width: f64) -> PyResult<(usize, f64)> {
        let dom = ms::BoxDomain::cube(half_width).map_err(ms_err)?;
        let tiling = ms::build_tiling(&self.target, &self.basis, n, &dom).map_err(ms_err)?;
        let rep = ms::check_hadamard(&self.basis, &tiling).map_err(ms_err)?;
        Ok((rep.interfaces, rep.max_second_singular))
    }

    /// `sup |f_n - Q x|` over the cube of the given half width.
    #[pyo3(signature = (n, half_width = 1.0))]
    fn sup_deviation(&self, n: usize, half_width: f64) -> PyResult<f64> {
        let dom = ms::BoxDomain::cube(half_width).map_err(ms_err)?;
        let tiling = ms::build_tiling(&self.target, &self.basis, n, &dom).map_err(ms_err)?;
        Ok(ms::build_fn(&self.basis, &tiling).map_err(ms_err)?.sup_deviation())
    }
}

/// Nodes, nodal displacements and energy.
type Solution = (Vec<[f64; 2]>, Vec<[f64; 2]>, f64);

/// Limit membrane energy minimizer on the unit square clamped at `x = 0`
/// under a constant body force. Returns node coordinates and displacements.
#[pyfunction]
#[pyo3(signature = (material, nx, ny, force, clamp = [0.0, 0.0], tol = 1e-8))]
fn solve_membrane(
    material: &PyMaterial,
    nx: usize,
    ny: usize,
    force: [f64; 2],
    clamp: [f64; 2],
    tol: f64,
) -> PyResult<Solution> {
    let mesh = fem::Mesh2D::rectangle(0.0, 1.0, 0.0, 1.0, nx, ny).map_err(fem_err)?;
    let bc = fem::BoundarySpec { left: fem::EdgeCondition::constant(clamp), ..Default::default() };
    let load = if force == [0.0, 0.0] { fem::LoadSpec::none() } else { fem::LoadSpec::body_force(move |_| force) };
    let rep = fem::solve_with(&mesh, &material.0, &bc, &load, tol, &fem::SolverOptions::default(), None)
        .map_err(fem_err)?;
    let u = (0..mesh.node_count()).map(|k| rep.field.node(k)).collect();
    Ok((mesh.nodes.clone(), u, rep.energy))
}

/// Default exponent ladder at `epsilon`: `(delta_eps, eta, delta, rho)`.
#[pyfunction]
fn scaling_ladder(epsilon: f64) -> PyResult<(f64, f64, f64, f64)> {
    let s = energy3d::ScalingParams::new(epsilon).map_err(e3_err)?;
    Ok((s.delta_eps, s.eta, s.delta, s.rho))
}

/// Recovery-energy sweep on the unit grain; one dict per epsilon.
#[pyfunction]
#[pyo3(signature = (u, eps, material, model = "uniaxial", qbar = None))]
fn gamma_sweep<'py>(
    py: Python<'py>,
    u: [f64; 2],
    eps: Vec<f64>,
    material: &PyMaterial,
    model: &str,
    qbar: Option<&PyQTensor>,
) -> PyResult<Vec<Bound<'py, pyo3::types::PyDict>>> {
    let model = match model {
        "uniaxial" => Model::Uniaxial,
        "biaxial" => Model::Biaxial,
        other => return Err(PyValueError::new_err(format!("unknown model `{other}`"))),
    };
    let qbar = qbar.map_or(QbarChoice::Optimal, |q| QbarChoice::Given(q.0));
    let target = GrainTarget { grain: Grain::unit(), ubar: u, qbar };
    let tab = py.detach(|| energy3d::gamma_sweep(&target, &eps, &material.0, model)).map_err(e3_err)?;
    tab.rows
        .iter()
        .map(|r| {
            let d = pyo3::types::PyDict::new(py);
            d.set_item("epsilon", r.epsilon)?;
            d.set_item("bulk", r.bulk)?;
            d.set_item("bracket", r.bracket)?;
            d.set_item("film", r.film)?;
            d.set_item("total", r.total)?;
            d.set_item("E0", r.e0)?;
            d.set_item("gap", r.gap)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn nematic_membrane_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMaterial>()?;
    m.add_class::<PyQTensor>()?;
    m.add_class::<PyLaminate>()?;
    m.add_function(wrap_pyfunction!(project_qb_euclidean, m)?)?;
    m.add_function(wrap_pyfunction!(project_qb_weighted, m)?)?;
    m.add_function(wrap_pyfunction!(dist2_weighted, m)?)?;
    m.add_function(wrap_pyfunction!(foundation_density, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_qbar, m)?)?;
    m.add_function(wrap_pyfunction!(solve_membrane, m)?)?;
    m.add_function(wrap_pyfunction!(scaling_ladder, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_sweep, m)?)?;
    Ok(())
}
