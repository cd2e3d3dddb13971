//! Dense Hermitian helpers.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::model::CVector;

/// Eigenvalues below this fraction of the largest magnitude are dropped.
pub const PINV_RELATIVE_THRESHOLD: f64 = 1e-10;

/// Moore-Penrose pseudoinverse of a Hermitian matrix applied to `b`, via
/// eigendecomposition with relative cutoff [`PINV_RELATIVE_THRESHOLD`].
pub fn hermitian_pinv_apply(a: &DMatrix<Complex64>, b: &CVector) -> CVector {
    let eig = SymmetricEigen::new(a.clone());
    let cutoff = PINV_RELATIVE_THRESHOLD * eig.eigenvalues.amax();
    let mut out = CVector::zeros(b.len());
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() > cutoff && lambda != 0.0 {
            let v = eig.eigenvectors.column(j);
            let coef = v.dotc(b) / lambda;
            out.axpy(coef, &v, Complex64::new(1.0, 0.0));
        }
    }
    out
}

pub fn hermitian_pinv(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = SymmetricEigen::new(a.clone());
    let cutoff = PINV_RELATIVE_THRESHOLD * eig.eigenvalues.amax();
    let n = a.nrows();
    let mut out = DMatrix::zeros(n, n);
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() > cutoff && lambda != 0.0 {
            let v = eig.eigenvectors.column(j);
            out += v * v.adjoint() * Complex64::new(1.0 / lambda, 0.0);
        }
    }
    out
}

/// Unit-norm eigenvector of the largest eigenvalue, with that eigenvalue.
pub fn principal_eigenvector(a: &DMatrix<Complex64>) -> (f64, CVector) {
    let eig = SymmetricEigen::new(a.clone());
    let j = eig.eigenvalues.imax();
    (eig.eigenvalues[j], eig.eigenvectors.column(j).into_owned())
}

pub fn outer(g: &CVector, scale: f64) -> DMatrix<Complex64> {
    g * g.adjoint() * Complex64::new(scale, 0.0)
}
