//! Dense linear algebra kernels: eigenvalues of general real matrices and
//! the matrix exponential.

mod dd;
mod eigen;
mod expm;

pub use eigen::{eigenvalues, symmetric_eigenvalues};
pub use expm::expm;

use nalgebra::DMatrix;

/// Infinity norm (maximum absolute row sum).
pub fn norm_inf(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// One norm (maximum absolute column sum).
pub fn norm_one(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}
