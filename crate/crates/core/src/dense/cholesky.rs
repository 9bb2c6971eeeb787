use super::RealMatrix;
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Cholesky factor `L` (lower triangular, positive diagonal) with `L Lᵀ = M`.
///
/// Fails with [`Error::NotPositiveDefinite`] on the first pivot that is not
/// strictly positive.
pub fn cholesky(m: &RealMatrix, tol: &Tolerances) -> Result<RealMatrix> {
    m.ensure_symmetric(tol.symmetry)?;
    let n = m.rows();
    let mut l = RealMatrix::zeros(n, n);
    for j in 0..n {
        let mut pivot = m[(j, j)];
        for k in 0..j {
            pivot -= l[(j, k)] * l[(j, k)];
        }
        if !(pivot > 0.0) {
            return Err(Error::NotPositiveDefinite { index: j, pivot });
        }
        let d = pivot.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut acc = m[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = acc / d;
        }
    }
    Ok(l)
}

/// Inverse of a lower-triangular matrix with non-zero diagonal, by forward
/// substitution column by column.
pub fn invert_lower(l: &RealMatrix) -> Result<RealMatrix> {
    if !l.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            l.rows(),
            l.cols()
        )));
    }
    let n = l.rows();
    let mut inv = RealMatrix::zeros(n, n);
    for j in 0..n {
        if l[(j, j)] == 0.0 {
            return Err(Error::NotPositiveDefinite {
                index: j,
                pivot: 0.0,
            });
        }
        inv[(j, j)] = 1.0 / l[(j, j)];
        for i in (j + 1)..n {
            let mut acc = 0.0;
            for k in j..i {
                acc += l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -acc / l[(i, i)];
        }
    }
    Ok(inv)
}
