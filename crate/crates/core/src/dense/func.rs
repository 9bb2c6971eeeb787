use super::{sym_eigen, RealMatrix};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Spectral matrix function `f(A) = V diag(f(values)) Vᵀ` of a symmetric `A`.
///
/// Fails with [`Error::DomainError`] when `f` is not finite on some eigenvalue.
pub fn sym_func(a: &RealMatrix, f: impl Fn(f64) -> f64, tol: &Tolerances) -> Result<RealMatrix> {
    let eig = sym_eigen(a, tol)?;
    let mapped: Vec<f64> = eig
        .values
        .iter()
        .map(|&x| {
            let y = f(x);
            if y.is_finite() {
                Ok(y)
            } else {
                Err(Error::DomainError(format!(
                    "matrix function undefined at eigenvalue {x:e}"
                )))
            }
        })
        .collect::<Result<_>>()?;
    let vd = &eig.vectors * &RealMatrix::from_diag(&mapped);
    Ok((&vd * &eig.vectors.transpose()).symmetrized())
}

/// Principal square root of a symmetric positive-definite matrix.
pub fn sqrtm(a: &RealMatrix, tol: &Tolerances) -> Result<RealMatrix> {
    sym_func(a, positive(f64::sqrt), tol)
}

/// Inverse principal square root of a symmetric positive-definite matrix.
pub fn inv_sqrtm(a: &RealMatrix, tol: &Tolerances) -> Result<RealMatrix> {
    sym_func(a, positive(|x| 1.0 / x.sqrt()), tol)
}

fn positive(f: impl Fn(f64) -> f64) -> impl Fn(f64) -> f64 {
    move |x| if x > 0.0 { f(x) } else { f64::NAN }
}
