//! Covariance matrices, symplectic spectra and the Williamson normal form.
//!
//! Both the spectrum and the normal form go through the same reduction:
//! factor `M = L Lᵀ`, form the antisymmetric `K = Lᵀ J L` and diagonalize the
//! symmetric `K Kᵀ = -K²`. Since `Lᵀ (-(JM)²) L⁻ᵀ = -K²`, its eigenvalues are
//! the squared symplectic eigenvalues, each appearing twice.

use crate::dense::{cholesky, invert_lower, sym_eigen, RealMatrix};
use crate::error::{Error, Result};
use crate::symplectic::{symplectic_form, SymplecticMatrix};
use crate::tolerance::Tolerances;

/// Second moments `Re⟨η ηᵀ⟩` of a zero-mean Gaussian state, interleaved
/// `(q₀, p₀, q₁, p₁, …)`.
///
/// Construction checks shape and symmetry only. Physicality is a property
/// of the spectrum and is tested by [`check_physical`].
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    body: RealMatrix,
}

impl CovarianceMatrix {
    /// Accepts an even square matrix whose asymmetry is at most
    /// `tol * max(1, ||M||_max)`, and symmetrizes it.
    pub fn new(body: RealMatrix, tol: f64) -> Result<Self> {
        if !body.rows().is_multiple_of(2) {
            return Err(Error::DimensionMismatch(format!(
                "covariance matrices have even dimension, got {}",
                body.rows()
            )));
        }
        body.ensure_symmetric(tol)?;
        Ok(Self {
            body: body.symmetrized(),
        })
    }

    pub(crate) fn from_symmetric_unchecked(body: RealMatrix) -> Self {
        debug_assert!(body.is_square() && body.rows().is_multiple_of(2));
        Self { body }
    }

    pub fn modes(&self) -> usize {
        self.body.rows() / 2
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.body
    }

    pub fn into_matrix(self) -> RealMatrix {
        self.body
    }
}

/// Symplectic eigenvalues, one per mode, in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpectrum {
    values: Vec<f64>,
}

impl SymplecticSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::NAN)
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NAN)
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }
}

/// `S` with `S M Sᵀ = ⊕ λ_i 𝟙₂`, the `λ_i` listed in `spectrum`.
#[derive(Debug, Clone)]
pub struct WilliamsonDecomposition {
    pub s: SymplecticMatrix,
    pub spectrum: SymplecticSpectrum,
}

impl WilliamsonDecomposition {
    /// `⊕ λ_i 𝟙₂`.
    pub fn normal_form(&self) -> RealMatrix {
        let diag: Vec<f64> = self.spectrum.values.iter().flat_map(|&l| [l, l]).collect();
        RealMatrix::from_diag(&diag)
    }
}

struct SkewReduction {
    l: RealMatrix,
    k: RealMatrix,
    values: Vec<f64>,
    vectors: RealMatrix,
}

fn reduce(m: &CovarianceMatrix, tol: &Tolerances) -> Result<SkewReduction> {
    let l = cholesky(m.matrix(), tol)?;
    let j = symplectic_form(m.modes());
    let k = &(&l.transpose() * &j) * &l;
    let kkt = (&k * &k.transpose()).symmetrized();
    let eig = sym_eigen(&kkt, tol)?;
    Ok(SkewReduction {
        l,
        k,
        values: eig.values,
        vectors: eig.vectors,
    })
}

/// Groups the descending eigenvalue list into runs of (relatively) equal
/// values; each run must have even length.
fn paired_clusters(values: &[f64], tol: &Tolerances) -> Result<Vec<std::ops::Range<usize>>> {
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        let split = i == values.len() || {
            let (a, b) = (values[i - 1], values[i]);
            (a - b).abs() > tol.pairing * a.abs().max(b.abs())
        };
        if split {
            if (i - start) % 2 != 0 {
                // report the mismatched neighbour
                let first = values[i - 1];
                let second = if i < values.len() {
                    values[i]
                } else {
                    values[start.saturating_sub(1)]
                };
                return Err(Error::UnpairedEigenvalue { first, second });
            }
            clusters.push(start..i);
            start = i;
        }
    }
    Ok(clusters)
}

/// Eigenspace split inside a paired cluster, relative to the largest
/// eigenvalue of `K Kᵀ`. Far above the eigensolver's noise, far below the
/// pairing tolerance, so nearly equal but distinct symplectic eigenvalues
/// get separate bases.
const EIGENSPACE_TOL: f64 = 1e-10;

/// Splits a paired cluster at gaps above `EIGENSPACE_TOL * values[0]`, or
/// keeps it whole if that leaves an odd piece.
fn eigenspaces(values: &[f64], cluster: std::ops::Range<usize>) -> Vec<std::ops::Range<usize>> {
    let floor = EIGENSPACE_TOL * values.first().copied().unwrap_or(0.0).abs();
    let mut pieces = Vec::new();
    let mut start = cluster.start;
    for i in cluster.start + 1..=cluster.end {
        if i == cluster.end || values[i - 1] - values[i] > floor {
            if !(i - start).is_multiple_of(2) {
                return vec![cluster];
            }
            pieces.push(start..i);
            start = i;
        }
    }
    pieces
}

/// Symplectic eigenvalues of `M`: the positive square roots of the doubled
/// eigenvalues of `-(JM)²`, one per mode, descending.
pub fn symplectic_spectrum(m: &CovarianceMatrix, tol: &Tolerances) -> Result<SymplecticSpectrum> {
    let red = reduce(m, tol)?;
    let clusters = paired_clusters(&red.values, tol)?;
    let mut values = Vec::with_capacity(m.modes());
    for c in clusters {
        for pair in red.values[c].chunks(2) {
            values.push((0.5 * (pair[0] + pair[1])).max(0.0).sqrt());
        }
    }
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(SymplecticSpectrum { values })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn project_out(v: &mut [f64], basis: &[Vec<f64>]) {
    // two passes of classical Gram–Schmidt
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Williamson normal form `S M Sᵀ = ⊕ λ_i 𝟙₂` with `S` symplectic.
///
/// Inside each doubled eigenspace of `K Kᵀ` a unit vector `u` is picked
/// (the remaining basis vector with the largest component outside the span
/// already used), completed by `v = K u / |K u|`, and the span `{u, v}` is
/// deflated. With the columns of `Q` ordered `(v, u)` per pair,
/// `Qᵀ K Q = ⊕ λ_i J₂`, and `S = W^{1/2} Qᵀ L⁻¹`.
pub fn williamson_decompose(
    m: &CovarianceMatrix,
    tol: &Tolerances,
) -> Result<WilliamsonDecomposition> {
    let red = reduce(m, tol)?;
    let clusters = paired_clusters(&red.values, tol)?;
    let n = m.matrix().rows();

    let mut chosen: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut pairs: Vec<(f64, Vec<f64>, Vec<f64>)> = Vec::with_capacity(n / 2);
    for c in clusters
        .into_iter()
        .flat_map(|c| eigenspaces(&red.values, c))
    {
        let candidates: Vec<Vec<f64>> = c.clone().map(|i| red.vectors.column(i)).collect();
        for _ in 0..c.len() / 2 {
            let mut best: Option<(f64, Vec<f64>)> = None;
            for cand in &candidates {
                let mut x = cand.clone();
                project_out(&mut x, &chosen);
                let norm = dot(&x, &x);
                if best.as_ref().is_none_or(|(b, _)| norm > *b) {
                    best = Some((norm, x));
                }
            }
            let (_, mut u) = best.expect("cluster has at least two candidates");
            normalize(&mut u);
            let mut v = red.k.matvec(&u);
            project_out(&mut v, &chosen);
            project_out(&mut v, std::slice::from_ref(&u));
            normalize(&mut v);
            let lambda = dot(&v, &red.k.matvec(&u));
            chosen.push(u.clone());
            chosen.push(v.clone());
            pairs.push((lambda, v, u));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

    let linv = invert_lower(&red.l)?;
    let mut qt = RealMatrix::zeros(n, n);
    for (i, (lambda, v, u)) in pairs.iter().enumerate() {
        let w = lambda.sqrt();
        for c in 0..n {
            qt[(2 * i, c)] = w * v[c];
            qt[(2 * i + 1, c)] = w * u[c];
        }
    }
    let s = &qt * &linv;
    let spectrum = SymplecticSpectrum {
        values: pairs.iter().map(|p| p.0).collect(),
    };
    Ok(WilliamsonDecomposition {
        s: SymplecticMatrix::from_trusted(s),
        spectrum,
    })
}

/// Verdict of [`check_physical`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalityReport {
    pub physical: bool,
    /// Smallest symplectic eigenvalue; absent when `M` is not positive
    /// definite and no spectrum exists.
    pub min_lambda: Option<f64>,
}

/// Uncertainty-principle check: every symplectic eigenvalue is at least
/// `1/2 - tol`.
pub fn check_physical(m: &CovarianceMatrix, tol: f64) -> PhysicalityReport {
    match symplectic_spectrum(m, &Tolerances::default()) {
        Ok(spec) => PhysicalityReport {
            physical: spec.min() >= 0.5 - tol,
            min_lambda: Some(spec.min()),
        },
        Err(_) => PhysicalityReport {
            physical: false,
            min_lambda: None,
        },
    }
}

/// Every symplectic eigenvalue within `tol` of `1/2`.
pub fn purity_check(m: &CovarianceMatrix, tol: f64) -> bool {
    symplectic_spectrum(m, &Tolerances::default())
        .map(|spec| spec.values.iter().all(|l| (l - 0.5).abs() <= tol))
        .unwrap_or(false)
}

/// Outcome of [`isotropy_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropyReport {
    /// `λ₀` when the state is isotropic.
    pub lambda0: Option<f64>,
    /// `sqrt(tr(E) / 2k)` with `E = -(JM)²`, reported either way.
    pub estimate: f64,
    /// `||E - λ₀² 𝟙||_max`.
    pub deviation: f64,
}

/// Tests `-(JM)² = λ₀² 𝟙`, accepting deviations up to `tol * max(1, λ₀²)`.
pub fn isotropy_check(m: &CovarianceMatrix, tol: f64) -> IsotropyReport {
    let n = m.matrix().rows();
    let jm = &symplectic_form(m.modes()) * m.matrix();
    let e = (&jm * &jm).scale(-1.0);
    let lambda0_sq = e.trace() / n as f64;
    let deviation = e.max_abs_diff(&RealMatrix::identity(n).scale(lambda0_sq));
    let estimate = lambda0_sq.max(0.0).sqrt();
    let isotropic = lambda0_sq > 0.0 && deviation <= tol * lambda0_sq.max(1.0);
    IsotropyReport {
        lambda0: isotropic.then_some(estimate),
        estimate,
        deviation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{random_pure_cm, thermal_cm, vacuum_cm, Scramble};
    use crate::symplectic::{conjugate_cm, random_symplectic};

    fn cm(diag: &[f64]) -> CovarianceMatrix {
        CovarianceMatrix::new(RealMatrix::from_diag(diag), 1e-12).unwrap()
    }

    #[test]
    fn vacuum_spectrum_is_half() {
        let spec = symplectic_spectrum(&vacuum_cm(3), &Tolerances::default()).unwrap();
        assert_eq!(spec.len(), 3);
        for l in spec.values() {
            assert!((l - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn normal_form_input_reads_off_spectrum() {
        let spec = symplectic_spectrum(&cm(&[0.7, 0.7, 2.0, 2.0]), &Tolerances::default()).unwrap();
        assert!((spec.values()[0] - 2.0).abs() < 1e-14);
        assert!((spec.values()[1] - 0.7).abs() < 1e-14);
    }

    #[test]
    fn spectrum_survives_scrambling() {
        let base = cm(&[2.0, 2.0, 0.7, 0.7]);
        let s = random_symplectic(2, 21, 1.5);
        let scrambled = conjugate_cm(&base, &s).unwrap();
        let spec = symplectic_spectrum(&scrambled, &Tolerances::default()).unwrap();
        assert!((spec.values()[0] - 2.0).abs() < 1e-8);
        assert!((spec.values()[1] - 0.7).abs() < 1e-8);
    }

    #[test]
    fn odd_or_asymmetric_matrices_are_rejected() {
        assert!(CovarianceMatrix::new(RealMatrix::identity(3), 1e-12).is_err());
        let m = RealMatrix::from_rows(&[[1.0, 0.5], [0.0, 1.0]]).unwrap();
        assert!(matches!(
            CovarianceMatrix::new(m, 1e-10),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn unpaired_spectrum_is_detected() {
        let tol = Tolerances::default();
        assert_eq!(
            paired_clusters(&[4.0, 4.0, 1.0, 1.0], &tol).unwrap(),
            vec![0..2, 2..4]
        );
        assert_eq!(paired_clusters(&[1.0; 4], &tol).unwrap(), vec![0..4]);
        assert!(matches!(
            paired_clusters(&[4.0, 4.0, 2.0], &tol),
            Err(Error::UnpairedEigenvalue { .. })
        ));
        assert!(matches!(
            paired_clusters(&[4.0, 3.0, 2.0, 2.0], &tol),
            Err(Error::UnpairedEigenvalue {
                first: 4.0,
                second: 3.0
            })
        ));
    }

    #[test]
    fn williamson_of_normal_form_is_a_permutation() {
        let m = cm(&[0.7, 0.7, 2.0, 2.0]);
        let w = williamson_decompose(&m, &Tolerances::default()).unwrap();
        assert!((w.spectrum.values()[0] - 2.0).abs() < 1e-14);
        let sms = &(w.s.matrix() * m.matrix()) * &w.s.matrix().transpose();
        assert!(sms.max_abs_diff(&w.normal_form()) < 1e-13);
        // entries of S are 0 or ±1 for a normal-form input
        for x in w.s.matrix().as_slice() {
            assert!(x.abs() < 1e-12 || (x.abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn williamson_of_pure_state_is_half() {
        for seed in 0..10 {
            let m = random_pure_cm(4, seed, 2.0);
            let w = williamson_decompose(&m, &Tolerances::default()).unwrap();
            for l in w.spectrum.values() {
                assert!((l - 0.5).abs() < 1e-9);
            }
            assert!(w.s.residual() < 1e-9, "seed {seed}: {}", w.s.residual());
        }
    }

    #[test]
    fn williamson_reconstructs_random_physical_states() {
        for seed in 0..20 {
            let lambdas = [3.1, 1.7, 1.7, 0.5, 0.9];
            let m = thermal_cm(&lambdas, Some(Scramble { seed, r_max: 1.5 })).unwrap();
            let w = williamson_decompose(&m, &Tolerances::default()).unwrap();
            let sms = &(w.s.matrix() * m.matrix()) * &w.s.matrix().transpose();
            assert!(sms.max_abs_diff(&w.normal_form()) <= 1e-8 * m.matrix().max_abs());
            assert!(w.s.residual() < 1e-9);
            let inv = w.s.inverse();
            let back = &(inv.matrix() * &w.normal_form()) * &inv.matrix().transpose();
            assert!(back.max_abs_diff(m.matrix()) <= 1e-8 * m.matrix().max_abs());
        }
    }

    #[test]
    fn physicality_verdicts() {
        let vac = check_physical(&vacuum_cm(2), 1e-9);
        assert!(vac.physical);
        assert!((vac.min_lambda.unwrap() - 0.5).abs() < 1e-15);

        let quarter = cm(&[0.25; 4]);
        let r = check_physical(&quarter, 1e-9);
        assert!(!r.physical);
        assert!((r.min_lambda.unwrap() - 0.25).abs() < 1e-15);

        let thermal = check_physical(&cm(&[1.3; 4]), 1e-9);
        assert!(thermal.physical);
        assert!((thermal.min_lambda.unwrap() - 1.3).abs() < 1e-14);

        let indefinite = cm(&[1.0, -1.0]);
        assert_eq!(
            check_physical(&indefinite, 1e-9),
            PhysicalityReport {
                physical: false,
                min_lambda: None
            }
        );
    }

    #[test]
    fn purity_and_isotropy() {
        assert!(purity_check(&vacuum_cm(3), 1e-9));
        assert!(!purity_check(&cm(&[1.3; 4]), 1e-9));
        let iso = isotropy_check(&vacuum_cm(2), 1e-9);
        assert_eq!(iso.lambda0, Some(0.5));

        let two_levels = isotropy_check(&cm(&[2.0, 2.0, 0.7, 0.7]), 1e-8);
        assert!(two_levels.lambda0.is_none());
        assert!(two_levels.deviation > 1.0);

        for seed in 0..10 {
            let m = random_pure_cm(5, seed, 2.0);
            let r = isotropy_check(&m, 1e-8);
            assert!((r.lambda0.unwrap() - 0.5).abs() < 1e-8);
            assert!(purity_check(&m, 1e-8));
        }
    }

    #[test]
    fn nearly_equal_eigenvalues_are_resolved() {
        let lambdas = [2.0, 0.5 + 3e-8, 0.5, 0.5];
        let m = thermal_cm(
            &lambdas,
            Some(Scramble {
                seed: 4,
                r_max: 1.0,
            }),
        )
        .unwrap();
        let w = williamson_decompose(&m, &Tolerances::default()).unwrap();
        let d = &(w.s.matrix() * m.matrix()) * &w.s.matrix().transpose();
        assert!(d.max_abs_diff(&w.normal_form()) < 1e-12 * m.matrix().max_abs());
        assert!((w.spectrum.values()[1] - (0.5 + 3e-8)).abs() < 1e-12);
    }

    #[test]
    fn eigenspaces_split_only_into_even_pieces() {
        let v = [4.0, 4.0, 1.0, 1.0, 1.0 - 1e-7, 1.0 - 1e-7];
        assert_eq!(eigenspaces(&v, 2..6), vec![2..4, 4..6]);
        let odd = [4.0, 1.0, 1.0 - 1e-7, 1.0 - 1e-7, 1.0 - 2e-7];
        assert_eq!(eigenspaces(&odd, 1..5), vec![1..5]);
    }
}
