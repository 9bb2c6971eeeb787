//! Reference and random covariance matrices (ħ = 1).
//!
//! Two-mode blocks use coordinates `(q_A, p_A, q_B, p_B)`:
//!
//! ```text
//! ⎡ λ  0  κ  0 ⎤
//! ⎢ 0  λ  0 -κ ⎥
//! ⎢ κ  0  λ  0 ⎥
//! ⎣ 0 -κ  0  λ ⎦
//! ```
//!
//! Random generators are `λ₀ S Sᵀ` or `S W Sᵀ` with `S` from
//! [`random_symplectic`], so fixtures are reproducible from `(seed, r_max)`.

use crate::dense::{inv_sqrtm, sqrtm, sym_eigen, RealMatrix};
use crate::error::{Error, Result};
use crate::modewise::Bipartition;
use crate::symplectic::{conjugate_cm, random_symplectic};
use crate::tolerance::Tolerances;
use crate::williamson::CovarianceMatrix;

/// `𝟙/2` on `k` modes.
pub fn vacuum_cm(k: usize) -> CovarianceMatrix {
    CovarianceMatrix::from_symmetric_unchecked(RealMatrix::identity(2 * k).scale(0.5))
}

/// The two-mode block with diagonal `lambda` and coupling `kappa`, unchecked.
pub fn pair_block(lambda: f64, kappa: f64) -> RealMatrix {
    let mut m = RealMatrix::from_diag(&[lambda; 4]);
    m[(0, 2)] = kappa;
    m[(2, 0)] = kappa;
    m[(1, 3)] = -kappa;
    m[(3, 1)] = -kappa;
    m
}

/// Two-mode squeezed vacuum: `λ = cosh(2r)/2`, `κ = sinh(2r)/2`.
pub fn tmss_cm(r: f64) -> Result<CovarianceMatrix> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::DomainError(format!(
            "squeezing must be finite and non-negative, got {r}"
        )));
    }
    let two_r = 2.0 * r;
    let body = pair_block(0.5 * two_r.cosh(), 0.5 * two_r.sinh());
    Ok(CovarianceMatrix::from_symmetric_unchecked(body))
}

/// Isotropic two-mode block with local eigenvalue `lambda` and
/// `κ = sqrt(λ² - λ₀²)`.
pub fn isotropic_pair_cm(lambda0: f64, lambda: f64) -> Result<CovarianceMatrix> {
    if !(lambda0 >= 0.5) || !(lambda >= lambda0) || !lambda.is_finite() {
        return Err(Error::DomainError(format!(
            "need lambda >= lambda0 >= 1/2, got lambda0 = {lambda0}, lambda = {lambda}"
        )));
    }
    let kappa = ((lambda - lambda0) * (lambda + lambda0)).sqrt();
    Ok(CovarianceMatrix::from_symmetric_unchecked(pair_block(
        lambda, kappa,
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Open,
    Periodic,
}

/// Harmonic chain `H = ½ Σ p² + ½ qᵀ V q` with
/// `V = mass_term · 𝟙 + coupling · L`, `L` the graph Laplacian of the chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    pub n: usize,
    pub coupling: f64,
    pub mass_term: f64,
    pub boundary: Boundary,
}

impl ChainSpec {
    /// The potential matrix `V`. A periodic chain links site `n-1` back to
    /// site `0`; for `n = 2` that doubles the single bond.
    pub fn potential(&self) -> RealMatrix {
        let n = self.n;
        let mut v = RealMatrix::identity(n).scale(self.mass_term);
        let bonds = match self.boundary {
            Boundary::Open => n.saturating_sub(1),
            Boundary::Periodic if n > 1 => n,
            Boundary::Periodic => 0,
        };
        for i in 0..bonds {
            let j = (i + 1) % n;
            v[(i, i)] += self.coupling;
            v[(j, j)] += self.coupling;
            v[(i, j)] -= self.coupling;
            v[(j, i)] -= self.coupling;
        }
        v
    }
}

/// Ground state of the chain: `⟨q qᵀ⟩ = V^{-1/2}/2`, `⟨p pᵀ⟩ = V^{1/2}/2`,
/// `⟨q p⟩ = 0`.
pub fn harmonic_chain_cm(spec: &ChainSpec) -> Result<CovarianceMatrix> {
    if spec.n == 0 {
        return Err(Error::DomainError("chain needs at least one site".into()));
    }
    let tol = Tolerances::default();
    let v = spec.potential();
    let eig = sym_eigen(&v, &tol)?;
    let min = *eig.values.last().expect("non-empty chain");
    if !(min > 1e-12 * v.max_abs().max(1.0)) {
        let index = eig.values.len() - 1;
        return Err(Error::NotPositiveDefinite { index, pivot: min });
    }
    let qq = inv_sqrtm(&v, &tol)?;
    let pp = sqrtm(&v, &tol)?;
    let n = spec.n;
    let mut m = RealMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            m[(2 * i, 2 * j)] = 0.5 * qq[(i, j)];
            m[(2 * i + 1, 2 * j + 1)] = 0.5 * pp[(i, j)];
        }
    }
    Ok(CovarianceMatrix::from_symmetric_unchecked(m.symmetrized()))
}

/// `½ S Sᵀ` with `S = random_symplectic(k, seed, r_max)`.
pub fn random_pure_cm(k: usize, seed: u64, r_max: f64) -> CovarianceMatrix {
    random_isotropic_cm(k, 0.5, seed, r_max).expect("1/2 is a valid base eigenvalue")
}

/// `λ₀ S Sᵀ` with `S = random_symplectic(k, seed, r_max)`.
pub fn random_isotropic_cm(
    k: usize,
    lambda0: f64,
    seed: u64,
    r_max: f64,
) -> Result<CovarianceMatrix> {
    if !(lambda0 >= 0.5) || !lambda0.is_finite() {
        return Err(Error::DomainError(format!(
            "isotropic states need lambda0 >= 1/2, got {lambda0}"
        )));
    }
    let s = random_symplectic(k, seed, r_max);
    let body = (s.matrix() * &s.matrix().transpose()).scale(lambda0);
    Ok(CovarianceMatrix::from_symmetric_unchecked(
        body.symmetrized(),
    ))
}

/// Seeded split of `modes` into a side A of `size_a` modes and its
/// complement, via a Fisher–Yates shuffle of `0..modes` from
/// [`SeededRng`](crate::rng::SeededRng); side A is the first `size_a`
/// shuffled modes.
pub fn random_bipartition(modes: usize, size_a: usize, seed: u64) -> Result<Bipartition> {
    let mut order: Vec<usize> = (0..modes).collect();
    crate::rng::SeededRng::new(seed).shuffle(&mut order);
    Bipartition::from_side_a(&order[..size_a.min(modes)], modes)
}

/// Seed and squeeze scale of the random symplectic used to scramble
/// a normal form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scramble {
    pub seed: u64,
    pub r_max: f64,
}

/// Thermal product state `⊕ λ_i 𝟙₂`, optionally conjugated by a random
/// symplectic.
pub fn thermal_cm(lambdas: &[f64], scramble: Option<Scramble>) -> Result<CovarianceMatrix> {
    if lambdas.is_empty() {
        return Err(Error::DomainError("need at least one mode".into()));
    }
    if let Some(&bad) = lambdas.iter().find(|&&l| !(l >= 0.5) || !l.is_finite()) {
        return Err(Error::DomainError(format!(
            "symplectic eigenvalues must be >= 1/2, got {bad}"
        )));
    }
    let diag: Vec<f64> = lambdas.iter().flat_map(|&l| [l, l]).collect();
    let w = CovarianceMatrix::from_symmetric_unchecked(RealMatrix::from_diag(&diag));
    match scramble {
        None => Ok(w),
        Some(sc) => conjugate_cm(&w, &random_symplectic(lambdas.len(), sc.seed, sc.r_max)),
    }
}
