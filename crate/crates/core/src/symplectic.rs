//! The symplectic form, symplecticity predicates and random symplectic
//! transformations.
//!
//! Coordinates are interleaved everywhere: index `2i` is `q` of mode `i`,
//! index `2i + 1` is `p` of mode `i`, so the form is `J = ⊕ [[0, 1], [-1, 0]]`.

use crate::dense::RealMatrix;
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::williamson::CovarianceMatrix;

/// Symplectic form `J_{2k}` for `k` modes.
pub fn symplectic_form(k: usize) -> RealMatrix {
    let mut j = RealMatrix::zeros(2 * k, 2 * k);
    for i in 0..k {
        j[(2 * i, 2 * i + 1)] = 1.0;
        j[(2 * i + 1, 2 * i)] = -1.0;
    }
    j
}

/// Verdict of [`is_symplectic`] together with `||S J Sᵀ - J||_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticCheck {
    pub symplectic: bool,
    pub residual: f64,
}

fn mode_count(s: &RealMatrix) -> Result<usize> {
    if !s.is_square() || !s.rows().is_multiple_of(2) {
        return Err(Error::DimensionMismatch(format!(
            "expected an even square matrix, got {}x{}",
            s.rows(),
            s.cols()
        )));
    }
    Ok(s.rows() / 2)
}

/// `||S J Sᵀ - J||_max`.
pub fn symplectic_residual(s: &RealMatrix) -> Result<f64> {
    let k = mode_count(s)?;
    let j = symplectic_form(k);
    Ok((&(s * &j) * &s.transpose()).max_abs_diff(&j))
}

/// `||Sᵀ S - 1||_max`.
pub fn orthogonality_residual(s: &RealMatrix) -> f64 {
    (&s.transpose() * s).max_abs_diff(&RealMatrix::identity(s.cols()))
}

pub fn is_symplectic(s: &RealMatrix, tol: f64) -> Result<SymplecticCheck> {
    let residual = symplectic_residual(s)?;
    Ok(SymplecticCheck {
        symplectic: residual <= tol,
        residual,
    })
}

pub fn is_orthogonal_symplectic(s: &RealMatrix, tol: f64) -> Result<bool> {
    let check = is_symplectic(s, tol)?;
    Ok(check.symplectic && orthogonality_residual(s) <= tol)
}

/// A `2k × 2k` matrix satisfying `S J Sᵀ = J` within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    body: RealMatrix,
    modes: usize,
}

impl SymplecticMatrix {
    /// Wraps `body` after checking its symplectic residual against `tol`.
    pub fn new(body: RealMatrix, tol: f64) -> Result<Self> {
        let check = is_symplectic(&body, tol)?;
        if !check.symplectic {
            return Err(Error::DomainError(format!(
                "matrix is not symplectic (residual {:e})",
                check.residual
            )));
        }
        let modes = body.rows() / 2;
        Ok(Self { body, modes })
    }

    /// Wraps a matrix that is symplectic by construction.
    pub(crate) fn from_trusted(body: RealMatrix) -> Self {
        debug_assert!(body.is_square() && body.rows().is_multiple_of(2));
        let modes = body.rows() / 2;
        Self { body, modes }
    }

    pub fn identity(k: usize) -> Self {
        Self::from_trusted(RealMatrix::identity(2 * k))
    }

    /// Mode permutation: output mode `i` is input mode `order[i]`.
    pub fn mode_permutation(order: &[usize]) -> Self {
        let k = order.len();
        let mut p = RealMatrix::zeros(2 * k, 2 * k);
        for (new, &old) in order.iter().enumerate() {
            p[(2 * new, 2 * old)] = 1.0;
            p[(2 * new + 1, 2 * old + 1)] = 1.0;
        }
        Self::from_trusted(p)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.body
    }

    pub fn into_matrix(self) -> RealMatrix {
        self.body
    }

    pub fn transpose(&self) -> Self {
        Self::from_trusted(self.body.transpose())
    }

    /// `S⁻¹ = -J Sᵀ J`.
    pub fn inverse(&self) -> Self {
        let j = symplectic_form(self.modes);
        Self::from_trusted((&(&j * &self.body.transpose()) * &j).scale(-1.0))
    }

    /// `self · other` (apply `other` first).
    pub fn compose(&self, other: &SymplecticMatrix) -> Result<Self> {
        Ok(Self::from_trusted(self.body.matmul(&other.body)?))
    }

    pub fn residual(&self) -> f64 {
        symplectic_residual(&self.body).expect("symplectic matrices are even and square")
    }
}

/// `S M Sᵀ`, re-symmetrized.
pub fn conjugate_cm(m: &CovarianceMatrix, s: &SymplecticMatrix) -> Result<CovarianceMatrix> {
    if m.modes() != s.modes() {
        return Err(Error::DimensionMismatch(format!(
            "{}-mode transform applied to a {}-mode covariance matrix",
            s.modes(),
            m.modes()
        )));
    }
    let x = &(s.matrix() * m.matrix()) * &s.matrix().transpose();
    Ok(CovarianceMatrix::from_symmetric_unchecked(x.symmetrized()))
}

/// `S_A ⊕ S_B`, acting on the A-modes first and the B-modes after them.
pub fn direct_sum(s_a: &SymplecticMatrix, s_b: &SymplecticMatrix) -> SymplecticMatrix {
    SymplecticMatrix::from_trusted(s_a.matrix().direct_sum(s_b.matrix()))
}

/// Seeded random symplectic transformation `R₁ · D · R₂`.
///
/// `R₁` and `R₂` are orthogonal symplectic: each is `exp(G)` for
/// `G = (A + J A Jᵀ) / 2`, where `A` is antisymmetric with standard normal
/// entries drawn for its strict upper triangle in row-major order. `G` is
/// antisymmetric and commutes with `J`, so its exponential is orthogonal and
/// symplectic. `D = ⊕ diag(e^{r_i}, e^{-r_i})` with `r_i` uniform in
/// `[-r_max, r_max)`.
///
/// Draw order from [`SeededRng`]: generator of `R₁`, then `r_0 … r_{k-1}`,
/// then generator of `R₂`.
pub fn random_symplectic(k: usize, seed: u64, r_max: f64) -> SymplecticMatrix {
    assert!(k >= 1, "random_symplectic needs at least one mode");
    assert!(r_max >= 0.0, "squeeze scale must be non-negative");
    let mut rng = SeededRng::new(seed);
    let r1 = random_orthogonal_symplectic(k, &mut rng);
    let mut d = Vec::with_capacity(2 * k);
    for _ in 0..k {
        let r = rng.uniform_in(-r_max, r_max);
        d.push(r.exp());
        d.push((-r).exp());
    }
    let r2 = random_orthogonal_symplectic(k, &mut rng);
    let s = &(&r1 * &RealMatrix::from_diag(&d)) * &r2;
    SymplecticMatrix::from_trusted(s)
}

fn random_orthogonal_symplectic(k: usize, rng: &mut SeededRng) -> RealMatrix {
    let n = 2 * k;
    let mut a = RealMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let x = rng.normal();
            a[(i, j)] = x;
            a[(j, i)] = -x;
        }
    }
    let j = symplectic_form(k);
    let jajt = &(&j * &a) * &j.transpose();
    expm(&(&a + &jajt).scale(0.5))
}

/// Matrix exponential by scaling and squaring of the Taylor series.
fn expm(g: &RealMatrix) -> RealMatrix {
    let n = g.rows();
    let norm = g.frobenius();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let b = g.scale(0.5_f64.powi(squarings as i32));
    let mut sum = RealMatrix::identity(n);
    let mut term = RealMatrix::identity(n);
    for order in 1..40 {
        term = (&term * &b).scale(1.0 / order as f64);
        sum = &sum + &term;
        if term.max_abs() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn form_for_one_and_two_modes() {
        let j1 = symplectic_form(1);
        assert_eq!(
            j1,
            RealMatrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]).unwrap()
        );
        let j2 = symplectic_form(2);
        assert_eq!(j2, j1.direct_sum(&j1));
        for k in 1..5 {
            let j = symplectic_form(k);
            assert!((&j * &j).max_abs_diff(&RealMatrix::identity(2 * k).scale(-1.0)) <= 1e-15);
            assert_eq!(&j * &j.transpose(), RealMatrix::identity(2 * k));
            assert_eq!(j.transpose(), j.scale(-1.0));
        }
    }

    #[test]
    fn identity_and_form_are_symplectic() {
        let check = is_symplectic(&RealMatrix::identity(4), 1e-12).unwrap();
        assert!(check.symplectic);
        assert_eq!(check.residual, 0.0);
        assert!(
            is_symplectic(&symplectic_form(2), 1e-12)
                .unwrap()
                .symplectic
        );
    }

    #[test]
    fn stretch_is_not_symplectic() {
        // diag(2, 1) J diag(2, 1) = 2 J
        let s = RealMatrix::from_diag(&[2.0, 1.0]);
        let check = is_symplectic(&s, 1e-12).unwrap();
        assert!(!check.symplectic);
        assert!((check.residual - 1.0).abs() < 1e-15);
    }

    #[test]
    fn odd_dimension_is_rejected() {
        assert!(matches!(
            is_symplectic(&RealMatrix::identity(3), 1e-12),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(is_orthogonal_symplectic(&RealMatrix::identity(3), 1e-12).is_err());
    }

    #[test]
    fn rotations_are_orthogonal_symplectic_squeezers_are_not() {
        for i in 0..=64 {
            let theta = i as f64 * std::f64::consts::TAU / 64.0;
            let (s, c) = theta.sin_cos();
            let rot = RealMatrix::from_rows(&[[c, s], [-s, c]]).unwrap();
            assert!(symplectic_residual(&rot).unwrap() < 1e-15);
            assert!(orthogonality_residual(&rot) < 1e-15);
            assert!(is_orthogonal_symplectic(&rot, 1e-12).unwrap());
        }
        let r: f64 = 0.4;
        let sq = RealMatrix::from_diag(&[r.exp(), (-r).exp()]);
        assert!(is_symplectic(&sq, 1e-12).unwrap().symplectic);
        assert!(!is_orthogonal_symplectic(&sq, 1e-12).unwrap());
    }

    #[test]
    fn random_symplectic_is_deterministic_and_symplectic() {
        let a = random_symplectic(4, 99, 1.5);
        let b = random_symplectic(4, 99, 1.5);
        assert_eq!(a, b);
        for seed in 0..20 {
            let s = random_symplectic(1 + (seed as usize % 6), seed, 2.0);
            assert!(s.residual() <= 1e-10, "seed {seed}: {}", s.residual());
        }
    }

    #[test]
    fn unsqueezed_random_symplectic_is_orthogonal() {
        for seed in 0..10 {
            let s = random_symplectic(3, seed, 0.0);
            assert!(is_orthogonal_symplectic(s.matrix(), 1e-10).unwrap());
        }
    }

    #[test]
    fn inverse_and_permutation() {
        let s = random_symplectic(3, 5, 1.0);
        let id = s.compose(&s.inverse()).unwrap();
        assert!(id.matrix().max_abs_diff(&RealMatrix::identity(6)) < 1e-10);
        let p = SymplecticMatrix::mode_permutation(&[2, 0, 1]);
        assert!(is_orthogonal_symplectic(p.matrix(), 0.0).unwrap());
        let x = p.matrix().matvec(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(x, vec![4.0, 5.0, 0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn direct_sum_stays_symplectic() {
        let id = direct_sum(
            &SymplecticMatrix::identity(1),
            &SymplecticMatrix::identity(2),
        );
        assert_eq!(id.matrix(), &RealMatrix::identity(6));
        let s = direct_sum(&random_symplectic(2, 1, 1.0), &random_symplectic(3, 2, 1.0));
        assert_eq!(s.modes(), 5);
        assert!(s.residual() < 1e-10);
    }

    #[test]
    fn direct_sum_conjugation_maps_cross_block() {
        let s_a = random_symplectic(1, 3, 0.8);
        let s_b = random_symplectic(2, 4, 0.8);
        let m = crate::states::random_pure_cm(3, 17, 1.0);
        let out = conjugate_cm(&m, &direct_sum(&s_a, &s_b)).unwrap();
        let k = m.matrix().block(0, 2, 2, 4);
        let expected = &(s_a.matrix() * &k) * &s_b.matrix().transpose();
        assert!(out.matrix().block(0, 2, 2, 4).max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn conjugating_vacuum_by_rotation_is_invariant() {
        let vac = crate::states::vacuum_cm(3);
        let out = conjugate_cm(&vac, &random_symplectic(3, 8, 0.0)).unwrap();
        assert!(out.matrix().max_abs_diff(vac.matrix()) < 1e-12);
        let same = conjugate_cm(&vac, &SymplecticMatrix::identity(3)).unwrap();
        assert_eq!(same, vac);
        assert!(conjugate_cm(&vac, &SymplecticMatrix::identity(2)).is_err());
    }
}
