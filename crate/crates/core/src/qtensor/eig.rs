use nalgebra::{Matrix3, SymmetricEigen, Vector3};

use super::SymTensor3;

/// Sorted spectral decomposition `A = R diag(values) R^T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenDecomp {
    /// Ascending eigenvalues.
    pub values: [f64; 3],
    /// Orthonormal eigenvectors stored as columns, matching `values`.
    pub frame: Matrix3<f64>,
}

impl EigenDecomp {
    pub fn vector(&self, k: usize) -> Vector3<f64> {
        self.frame.column(k).into_owned()
    }

    pub fn reconstruct(&self) -> SymTensor3 {
        reassemble(&self.values, &self.frame)
    }
}

/// `R diag(v) R^T` as a symmetric tensor.
pub fn reassemble(values: &[f64; 3], frame: &Matrix3<f64>) -> SymTensor3 {
    let d = Matrix3::from_diagonal(&Vector3::new(values[0], values[1], values[2]));
    SymTensor3::sym_of(&(frame * d * frame.transpose()))
}

fn fix_sign(v: &mut Vector3<f64>) {
    for k in 0..3 {
        if v[k].abs() > 1e-14 {
            if v[k] < 0.0 {
                *v = -*v;
            }
            return;
        }
    }
}

/// Symmetric eigendecomposition with ascending eigenvalues; each eigenvector
/// has its first nonzero component positive.
pub fn eig_sym3(a: &SymTensor3) -> EigenDecomp {
    let scale = a.to_array().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return EigenDecomp { values: [0.0; 3], frame: Matrix3::identity() };
    }
    // scaling keeps the iteration well away from under/overflow
    let m = a.to_matrix() / scale;
    let eig = SymmetricEigen::new(m);
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut values = [0.0; 3];
    let mut frame = Matrix3::zeros();
    for (k, &i) in idx.iter().enumerate() {
        values[k] = eig.eigenvalues[i] * scale;
        let mut v: Vector3<f64> = eig.eigenvectors.column(i).into_owned();
        v /= v.norm();
        fix_sign(&mut v);
        frame.set_column(k, &v);
    }
    EigenDecomp { values, frame }
}
