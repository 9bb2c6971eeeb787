//! Dense real kernels: the matrix carrier, Cholesky, a cyclic Jacobi
//! symmetric eigensolver and spectral matrix functions.

mod cholesky;
mod eigen;
mod func;
mod matrix;

pub use cholesky::{cholesky, invert_lower};
pub use eigen::{sym_eigen, SymEigen};
pub use func::{inv_sqrtm, sqrtm, sym_func};
pub use matrix::RealMatrix;
