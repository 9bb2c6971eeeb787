//! Modewise decomposition of pure and isotropic Gaussian states.
//!
//! Given `M` with `-(JM)² = λ₀² 𝟙` and a split of the modes into `A | B`,
//! local symplectic transformations `S_A`, `S_B` bring `M` to
//!
//! ```text
//! M̃ = M̃₁ ⊕ … ⊕ M̃_s ⊕ λ₀ 𝟙
//! ```
//!
//! where each `M̃_i` is a two-mode block (see [`crate::states`]) coupling one
//! A-mode to one B-mode with `κ_i² = λ_i² - λ₀²`.
//!
//! The construction: Williamson-reduce `M_A` and `M_B`; the cross block
//! between local modes of different eigenvalue then vanishes, and within a
//! degeneracy group of eigenvalue `λ > λ₀` it has the form
//! `K_λ = sqrt(λ² - λ₀²) · O_λ · β` with `β = ⊕ σ₃` and `O_λ` orthogonal
//! symplectic. Applying `O_λᵀ` to the A-modes of the group pairs them up.

use crate::dense::{inv_sqrtm, RealMatrix};
use crate::error::{Error, Result};
use crate::states::pair_block;
use crate::symplectic::{
    conjugate_cm, direct_sum, orthogonality_residual, symplectic_form, symplectic_residual,
    SymplecticMatrix,
};
use crate::tolerance::Tolerances;
use crate::williamson::{
    isotropy_check, williamson_decompose, CovarianceMatrix, SymplecticSpectrum,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Disjoint, non-empty mode sets covering every mode of a state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    side_a: Vec<usize>,
    side_b: Vec<usize>,
}

impl Bipartition {
    pub fn new(side_a: &[usize], side_b: &[usize], modes: usize) -> Result<Self> {
        let mut seen = vec![false; modes];
        for &i in side_a.iter().chain(side_b) {
            if i >= modes {
                return Err(Error::IndexOutOfRange { index: i, modes });
            }
            if seen[i] {
                return Err(Error::InvalidBipartition(format!("mode {i} listed twice")));
            }
            seen[i] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidBipartition(format!(
                "mode {missing} belongs to neither side"
            )));
        }
        if side_a.is_empty() || side_b.is_empty() {
            return Err(Error::InvalidBipartition(
                "both sides must be non-empty".into(),
            ));
        }
        let mut side_a = side_a.to_vec();
        let mut side_b = side_b.to_vec();
        side_a.sort_unstable();
        side_b.sort_unstable();
        Ok(Self { side_a, side_b })
    }

    /// Side A as given, side B its complement.
    pub fn from_side_a(side_a: &[usize], modes: usize) -> Result<Self> {
        if let Some(&bad) = side_a.iter().find(|&&i| i >= modes) {
            return Err(Error::IndexOutOfRange { index: bad, modes });
        }
        let side_b: Vec<usize> = (0..modes).filter(|i| !side_a.contains(i)).collect();
        Self::new(side_a, &side_b, modes)
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }

    pub fn side_b(&self) -> &[usize] {
        &self.side_b
    }

    pub fn side(&self, side: Side) -> &[usize] {
        match side {
            Side::A => &self.side_a,
            Side::B => &self.side_b,
        }
    }

    pub fn modes(&self) -> usize {
        self.side_a.len() + self.side_b.len()
    }

    /// The same split with the roles of A and B exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            side_a: self.side_b.clone(),
            side_b: self.side_a.clone(),
        }
    }

    fn check(&self, m: &CovarianceMatrix) -> Result<()> {
        if self.modes() != m.modes() {
            let index = self
                .side_a
                .iter()
                .chain(&self.side_b)
                .copied()
                .max()
                .unwrap_or(0);
            return Err(Error::IndexOutOfRange {
                index: index.max(self.modes()),
                modes: m.modes(),
            });
        }
        Ok(())
    }
}

fn coords(modes: &[usize]) -> Vec<usize> {
    modes.iter().flat_map(|&i| [2 * i, 2 * i + 1]).collect()
}

/// Reduced covariance matrix of one side (principal submatrix).
pub fn partial_cm(
    m: &CovarianceMatrix,
    part: &Bipartition,
    side: Side,
) -> Result<CovarianceMatrix> {
    part.check(m)?;
    let c = coords(part.side(side));
    Ok(CovarianceMatrix::from_symmetric_unchecked(
        m.matrix().select(&c, &c),
    ))
}

/// Correlations `Re⟨η_A η_Bᵀ⟩`, shape `2|A| × 2|B|`.
pub fn cross_block(m: &CovarianceMatrix, part: &Bipartition) -> Result<RealMatrix> {
    part.check(m)?;
    Ok(m.matrix()
        .select(&coords(part.side_a()), &coords(part.side_b())))
}

/// One entangled two-mode sector of the decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntangledPair {
    /// Local symplectic eigenvalue shared by both modes.
    pub lambda: f64,
    /// Coupling read off the transformed cross block, `κ ≥ 0`.
    pub kappa: f64,
    /// Mode of the transformed A side (output of `s_a`).
    pub index_a: usize,
    /// Mode of the transformed B side (output of `s_b`).
    pub index_b: usize,
}

#[derive(Debug, Clone)]
pub struct ModewiseDecomposition {
    pub lambda0: f64,
    pub s_a: SymplecticMatrix,
    pub s_b: SymplecticMatrix,
    /// Descending `λ`.
    pub pairs: Vec<EntangledPair>,
    pub residual_a: usize,
    pub residual_b: usize,
    /// Transformed A-side modes left at `λ₀`, ascending.
    pub residual_modes_a: Vec<usize>,
    /// Transformed B-side modes left at `λ₀`, ascending.
    pub residual_modes_b: Vec<usize>,
    /// Local symplectic spectra of the reduced states.
    pub spectrum_a: SymplecticSpectrum,
    pub spectrum_b: SymplecticSpectrum,
    /// Largest cross-block entry touching a `λ₀` mode before it was zeroed.
    pub residual_coupling: f64,
    /// `||T M Tᵀ - reconstruct(d)||_max / ||M||_max` for the global transform `T`.
    pub residual_norm: f64,
    /// Tolerance events: zeroed cross blocks, folded near-decoupled groups.
    pub notes: Vec<String>,
    pub partition: Bipartition,
}

impl ModewiseDecomposition {
    /// Symplectic transform on the full system, original mode order in,
    /// canonical paired layout out: `(A₁, B₁, …, A_s, B_s, residual A…, residual B…)`.
    pub fn global_transform(&self) -> SymplecticMatrix {
        let m = self.partition.side_a().len();
        let block_order: Vec<usize> = self
            .partition
            .side_a()
            .iter()
            .chain(self.partition.side_b())
            .copied()
            .collect();
        let to_blocks = SymplecticMatrix::mode_permutation(&block_order);
        let local = direct_sum(&self.s_a, &self.s_b);
        let to_pairs = SymplecticMatrix::mode_permutation(&self.paired_order(m));
        to_pairs
            .compose(&local)
            .and_then(|t| t.compose(&to_blocks))
            .expect("shapes agree by construction")
    }

    fn paired_order(&self, m: usize) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.partition.modes());
        for p in &self.pairs {
            order.push(p.index_a);
            order.push(m + p.index_b);
        }
        order.extend(self.residual_modes_a.iter().copied());
        order.extend(self.residual_modes_b.iter().map(|&j| m + j));
        order
    }
}

/// Canonical paired form: `⊕ pair blocks ⊕ λ₀ 𝟙`.
pub fn reconstruct(d: &ModewiseDecomposition) -> CovarianceMatrix {
    let k = 2 * d.pairs.len() + d.residual_a + d.residual_b;
    let mut out = RealMatrix::zeros(2 * k, 2 * k);
    for (i, p) in d.pairs.iter().enumerate() {
        out.set_block(4 * i, 4 * i, &pair_block(p.lambda, p.kappa));
    }
    for i in (4 * d.pairs.len())..(2 * k) {
        out[(i, i)] = d.lambda0;
    }
    CovarianceMatrix::from_symmetric_unchecked(out)
}

#[derive(Debug)]
struct Group {
    lambda: f64,
    a: Vec<usize>,
    b: Vec<usize>,
}

/// Joint greedy clustering of both local spectra, descending, on the
/// coupling scale `μ = sqrt(λ² − λ₀²)`. Far from `λ₀` this is the plain
/// `λ` gap; near `λ₀` it keeps weakly coupled pairs apart from the base
/// modes they would otherwise merge with.
fn cluster(
    spec_a: &SymplecticSpectrum,
    spec_b: &SymplecticSpectrum,
    lambda0: f64,
    tol: &Tolerances,
) -> Vec<Group> {
    let mu = |l: f64| ((l - lambda0) * (l + lambda0)).max(0.0).sqrt();
    let mut entries: Vec<(f64, Side, usize)> = spec_a
        .values()
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, Side::A, i))
        .chain(
            spec_b
                .values()
                .iter()
                .enumerate()
                .map(|(j, &l)| (l, Side::B, j)),
        )
        .collect();
    entries.sort_by(|x, y| y.0.total_cmp(&x.0));

    let mut groups: Vec<Group> = Vec::new();
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut prev = f64::NAN;
    for (l, side, idx) in entries {
        let start_new = groups.is_empty() || (mu(prev) - mu(l)) > tol.degeneracy_gap(mu(prev));
        if start_new {
            if let Some(g) = groups.last_mut() {
                g.lambda = sum / count as f64;
            }
            groups.push(Group {
                lambda: l,
                a: Vec::new(),
                b: Vec::new(),
            });
            sum = 0.0;
            count = 0;
        }
        let g = groups.last_mut().expect("pushed above");
        match side {
            Side::A => g.a.push(idx),
            Side::B => g.b.push(idx),
        }
        sum += l;
        count += 1;
        prev = l;
    }
    if let Some(g) = groups.last_mut() {
        g.lambda = sum / count as f64;
    }
    for g in &mut groups {
        g.a.sort_unstable();
        g.b.sort_unstable();
    }
    groups
}

/// Largest cross-block entry in the rows of `g.a` or the columns of `g.b`.
fn group_coupling(k: &RealMatrix, g: &Group) -> f64 {
    let rows =
        g.a.iter()
            .map(|&i| k.block(2 * i, 0, 2, k.cols()).max_abs());
    let cols =
        g.b.iter()
            .map(|&j| k.block(0, 2 * j, k.rows(), 2).max_abs());
    rows.chain(cols).fold(0.0, f64::max)
}

/// `β = ⊕ σ₃ = diag(1, -1, 1, -1, …)`.
fn beta(g: usize) -> RealMatrix {
    let d: Vec<f64> = (0..2 * g)
        .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    RealMatrix::from_diag(&d)
}

/// Nearest orthogonal symplectic matrix: keep the part commuting with `J`,
/// then take its polar factor.
fn project_orthosymplectic(o: &RealMatrix, tol: &Tolerances) -> Result<RealMatrix> {
    let j = symplectic_form(o.rows() / 2);
    let commuting = (o + &(&(&j * o) * &j.transpose())).scale(0.5);
    let gram = (&commuting.transpose() * &commuting).symmetrized();
    Ok(&commuting * &inv_sqrtm(&gram, tol)?)
}

/// Modewise decomposition of a pure or isotropic covariance matrix.
///
/// Fails with [`Error::NotIsotropic`] when `-(JM)²` deviates from `λ₀² 𝟙` by
/// more than `tol.isotropy`, with [`Error::DegeneracyMismatch`] when the
/// local spectra or cross blocks break the structure the decomposition
/// requires, and with [`Error::CouplingResidual`] when an extracted `O_λ` is
/// not orthogonal symplectic to `tol.orthosymplectic`.
pub fn modewise_decompose(
    m: &CovarianceMatrix,
    part: &Bipartition,
    tol: &Tolerances,
) -> Result<ModewiseDecomposition> {
    part.check(m)?;
    let iso = isotropy_check(m, tol.isotropy);
    let lambda0 = iso.lambda0.ok_or(Error::NotIsotropic {
        deviation: iso.deviation,
    })?;
    if lambda0 < 0.5 - tol.symplectic {
        return Err(Error::Unphysical {
            min_lambda: lambda0,
        });
    }
    let scale = m.matrix().max_abs();
    let mut notes = Vec::new();

    let n_a = part.side_a().len();
    let n_b = part.side_b().len();
    let w_a = williamson_decompose(&partial_cm(m, part, Side::A)?, tol)?;
    let w_b = williamson_decompose(&partial_cm(m, part, Side::B)?, tol)?;

    let block_order: Vec<usize> = part.side_a().iter().chain(part.side_b()).copied().collect();
    let blocked = conjugate_cm(m, &SymplecticMatrix::mode_permutation(&block_order))?;
    let local = conjugate_cm(&blocked, &direct_sum(&w_a.s, &w_b.s))?;
    let k = local.matrix().block(0, 2 * n_a, 2 * n_a, 2 * n_b);

    let silent = tol.coupling * scale;
    let loud = 10.0 * tol.coupling * scale;

    // group labels: None for the λ₀ group
    let groups = cluster(&w_a.spectrum, &w_b.spectrum, lambda0, tol);
    let base_gap = tol.degeneracy_gap(lambda0);
    let mut label_a = vec![None; n_a];
    let mut label_b = vec![None; n_b];
    let mut entangled = Vec::new();
    let mut fold_kappa = 0.0_f64;
    for (gi, g) in groups.iter().enumerate() {
        if g.lambda < lambda0 - base_gap {
            return Err(Error::DegeneracyMismatch(format!(
                "local eigenvalue {} lies below lambda0 = {lambda0}",
                g.lambda
            )));
        }
        let excess = g.lambda * g.lambda - lambda0 * lambda0;
        let decoupled = excess <= tol.degeneracy * tol.degeneracy;
        // within the λ gap of λ₀ only a coupling above tolerance makes a pair
        let near_base = (g.lambda - lambda0).abs() <= base_gap && group_coupling(&k, g) <= loud;
        if decoupled || near_base {
            if decoupled && excess > 0.0 {
                fold_kappa = fold_kappa.max(excess.sqrt());
            }
            if g.lambda - lambda0 > 0.0 && !g.a.is_empty() && !g.b.is_empty() {
                notes.push(format!(
                    "group at lambda = {} (excess {:e}) folded into the lambda0 block",
                    g.lambda,
                    g.lambda - lambda0
                ));
            }
            continue;
        }
        if g.lambda < lambda0 {
            return Err(Error::DegeneracyMismatch(format!(
                "local eigenvalue {} lies below lambda0 = {lambda0}",
                g.lambda
            )));
        }
        if g.a.len() != g.b.len() {
            return Err(Error::DegeneracyMismatch(format!(
                "eigenvalue {} has multiplicity {} on side A but {} on side B",
                g.lambda,
                g.a.len(),
                g.b.len()
            )));
        }
        for &i in &g.a {
            label_a[i] = Some(gi);
        }
        for &j in &g.b {
            label_b[j] = Some(gi);
        }
        entangled.push(gi);
    }

    // cross blocks outside the entangled groups must vanish
    let mut residual_coupling = 0.0_f64;
    let mut zeroed = 0.0_f64;
    for (i, la) in label_a.iter().enumerate() {
        for (j, lb) in label_b.iter().enumerate() {
            if la.is_some() && la == lb {
                continue;
            }
            let x = k.block(2 * i, 2 * j, 2, 2).max_abs();
            let touches_base = la.is_none() || lb.is_none();
            if touches_base {
                residual_coupling = residual_coupling.max(x);
            }
            let allowed = if touches_base {
                loud.max(2.0 * fold_kappa)
            } else {
                loud
            };
            if x > allowed {
                return Err(Error::DegeneracyMismatch(format!(
                    "cross block between local modes A{i} and B{j} is {x:e}, expected zero"
                )));
            }
            if x > silent {
                zeroed = zeroed.max(x);
            }
        }
    }
    if zeroed > 0.0 {
        notes.push(format!("zeroed cross-block entries up to {zeroed:e}"));
    }

    // one-sided orthogonal-symplectic rotation per entangled group
    let mut rot_a = RealMatrix::identity(2 * n_a);
    for &gi in &entangled {
        let g = &groups[gi];
        let kappa = ((g.lambda - lambda0) * (g.lambda + lambda0)).sqrt();
        let ca = coords(&g.a);
        let cb = coords(&g.b);
        let o = (&k.select(&ca, &cb) * &beta(g.a.len())).scale(1.0 / kappa);
        let residual = symplectic_residual(&o)?.max(orthogonality_residual(&o));
        if residual > tol.orthosymplectic {
            return Err(Error::CouplingResidual {
                lambda: g.lambda,
                residual,
            });
        }
        let ot = project_orthosymplectic(&o, tol)?.transpose();
        for (r, &ir) in ca.iter().enumerate() {
            for (c, &ic) in ca.iter().enumerate() {
                rot_a[(ir, ic)] = ot[(r, c)];
            }
        }
    }
    let s_a = SymplecticMatrix::from_trusted(rot_a).compose(&w_a.s)?;
    let s_b = w_b.s;

    let final_local = conjugate_cm(&blocked, &direct_sum(&s_a, &s_b))?;
    let kf = final_local.matrix().block(0, 2 * n_a, 2 * n_a, 2 * n_b);
    let mut pairs = Vec::new();
    for &gi in &entangled {
        let g = &groups[gi];
        for (&ia, &ib) in g.a.iter().zip(&g.b) {
            let kappa = 0.5 * (kf[(2 * ia, 2 * ib)] - kf[(2 * ia + 1, 2 * ib + 1)]);
            pairs.push(EntangledPair {
                lambda: g.lambda,
                kappa,
                index_a: ia,
                index_b: ib,
            });
        }
    }
    let residual_modes_a: Vec<usize> = (0..n_a).filter(|&i| label_a[i].is_none()).collect();
    let residual_modes_b: Vec<usize> = (0..n_b).filter(|&j| label_b[j].is_none()).collect();

    let mut d = ModewiseDecomposition {
        lambda0,
        s_a,
        s_b,
        residual_a: residual_modes_a.len(),
        residual_b: residual_modes_b.len(),
        pairs,
        residual_modes_a,
        residual_modes_b,
        spectrum_a: w_a.spectrum,
        spectrum_b: w_b.spectrum,
        residual_coupling,
        residual_norm: 0.0,
        notes,
        partition: part.clone(),
    };
    let transformed = conjugate_cm(m, &d.global_transform())?;
    d.residual_norm = transformed.matrix().max_abs_diff(reconstruct(&d).matrix()) / scale;
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{
        isotropic_pair_cm, random_pure_cm, thermal_cm, tmss_cm, vacuum_cm, Scramble,
    };
    use crate::symplectic::random_symplectic;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn bipartition_validation() {
        assert!(Bipartition::new(&[0, 2], &[1], 3).is_ok());
        assert!(matches!(
            Bipartition::new(&[0, 3], &[1, 2], 3),
            Err(Error::IndexOutOfRange { index: 3, modes: 3 })
        ));
        assert!(Bipartition::new(&[0, 1], &[1, 2], 3).is_err());
        assert!(Bipartition::new(&[0], &[1], 3).is_err());
        assert!(Bipartition::new(&[], &[0, 1], 2).is_err());
        let p = Bipartition::from_side_a(&[2, 0], 4).unwrap();
        assert_eq!(p.side_a(), &[0, 2]);
        assert_eq!(p.side_b(), &[1, 3]);
        assert_eq!(p.swapped().side_a(), &[1, 3]);
        assert!(Bipartition::from_side_a(&[0, 1], 2).is_err());
    }

    #[test]
    fn partial_and_cross_blocks() {
        let m = tmss_cm(1.0).unwrap();
        let part = Bipartition::from_side_a(&[0], 2).unwrap();
        let lambda = 0.5 * 2.0_f64.cosh();
        let kappa = 0.5 * 2.0_f64.sinh();
        let ma = partial_cm(&m, &part, Side::A).unwrap();
        assert_eq!(ma.matrix(), &RealMatrix::from_diag(&[lambda, lambda]));
        let k = cross_block(&m, &part).unwrap();
        assert_eq!(k, RealMatrix::from_diag(&[kappa, -kappa]));
        assert_eq!(cross_block(&m, &part.swapped()).unwrap(), k.transpose());

        let vac = vacuum_cm(4);
        let part = Bipartition::from_side_a(&[1, 3], 4).unwrap();
        assert_eq!(partial_cm(&vac, &part, Side::B).unwrap(), vacuum_cm(2));
        assert_eq!(cross_block(&vac, &part).unwrap(), RealMatrix::zeros(4, 4));

        let wrong = Bipartition::from_side_a(&[0], 3).unwrap();
        assert!(matches!(
            partial_cm(&vac, &wrong, Side::A),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn vacuum_has_no_pairs() {
        let d = modewise_decompose(
            &vacuum_cm(4),
            &Bipartition::from_side_a(&[0, 3], 4).unwrap(),
            &tol(),
        )
        .unwrap();
        assert!(d.pairs.is_empty());
        assert_eq!((d.residual_a, d.residual_b), (2, 2));
        assert!((d.lambda0 - 0.5).abs() < 1e-15);
        assert!(d.residual_norm < 1e-15);
    }

    #[test]
    fn single_tmss_pair() {
        let r = 1.0_f64;
        let d = modewise_decompose(
            &tmss_cm(r).unwrap(),
            &Bipartition::from_side_a(&[0], 2).unwrap(),
            &tol(),
        )
        .unwrap();
        assert_eq!(d.pairs.len(), 1);
        let p = d.pairs[0];
        assert!((p.lambda - 0.5 * (2.0 * r).cosh()).abs() < 1e-12);
        assert!((p.kappa - 0.5 * (2.0 * r).sinh()).abs() < 1e-12);
        assert!(d.residual_norm < 1e-12);
    }

    #[test]
    fn random_pure_state_three_five_split() {
        let m = random_pure_cm(8, 2024, 2.0);
        let part = Bipartition::from_side_a(&[1, 4, 6], 8).unwrap();
        let d = modewise_decompose(&m, &part, &tol()).unwrap();
        assert!(d.pairs.len() <= 3);
        assert_eq!(d.pairs.len() + d.residual_a, 3);
        assert_eq!(d.pairs.len() + d.residual_b, 5);
        assert!(d.residual_norm <= 1e-8, "residual {}", d.residual_norm);
        assert!(d.s_a.residual() < 1e-9 && d.s_b.residual() < 1e-9);
        let big_a: Vec<f64> = d
            .spectrum_a
            .values()
            .iter()
            .copied()
            .filter(|&l| l > 0.5 + 1e-6)
            .collect();
        let big_b: Vec<f64> = d
            .spectrum_b
            .values()
            .iter()
            .copied()
            .filter(|&l| l > 0.5 + 1e-6)
            .collect();
        assert_eq!(big_a.len(), big_b.len());
        for (a, b) in big_a.iter().zip(&big_b) {
            assert!((a - b).abs() < 1e-8);
        }
        for p in &d.pairs {
            assert!(p.kappa >= 0.0);
            assert!(
                (p.kappa * p.kappa - (p.lambda * p.lambda - 0.25)).abs()
                    < 1e-8 * p.lambda * p.lambda
            );
        }
        assert!(d.pairs.windows(2).all(|w| w[0].lambda >= w[1].lambda));
    }

    #[test]
    fn reconstruct_canonical_layout() {
        let d = modewise_decompose(
            &vacuum_cm(4),
            &Bipartition::from_side_a(&[0, 1], 4).unwrap(),
            &tol(),
        )
        .unwrap();
        assert_eq!(reconstruct(&d), vacuum_cm(4));

        let pair = modewise_decompose(
            &isotropic_pair_cm(0.5, 2.5).unwrap(),
            &Bipartition::from_side_a(&[0], 2).unwrap(),
            &tol(),
        )
        .unwrap();
        let r = reconstruct(&pair);
        assert!((r.matrix()[(0, 2)] - 6.0_f64.sqrt()).abs() < 1e-12);
        assert!((r.matrix()[(1, 3)] + 6.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn isotropic_mixed_state() {
        let m = crate::states::random_isotropic_cm(6, 1.3, 77, 1.5).unwrap();
        let part = Bipartition::from_side_a(&[0, 2, 3], 6).unwrap();
        let d = modewise_decompose(&m, &part, &tol()).unwrap();
        assert!((d.lambda0 - 1.3).abs() < 1e-8);
        assert!(d.residual_norm <= 1e-8);
        assert!(d.residual_coupling <= 1e-8);
    }

    #[test]
    fn thermal_state_is_not_isotropic() {
        let m = thermal_cm(
            &[2.0, 0.7],
            Some(Scramble {
                seed: 3,
                r_max: 0.5,
            }),
        )
        .unwrap();
        assert!(matches!(
            modewise_decompose(&m, &Bipartition::from_side_a(&[0], 2).unwrap(), &tol()),
            Err(Error::NotIsotropic { .. })
        ));
    }

    #[test]
    fn degenerate_pairs_need_the_rotation() {
        // two identical TMSS pairs (A0,B0), (A1,B1), scrambled locally so the
        // degenerate group has an arbitrary basis on each side
        let t = tmss_cm(0.6).unwrap();
        let mut body = RealMatrix::zeros(8, 8);
        body.set_block(0, 0, t.matrix());
        body.set_block(4, 4, t.matrix());
        let two = CovarianceMatrix::new(body, 1e-12).unwrap();
        // reorder to (A0, A1, B0, B1)
        let two = conjugate_cm(&two, &SymplecticMatrix::mode_permutation(&[0, 2, 1, 3])).unwrap();
        let local = direct_sum(&random_symplectic(2, 5, 1.0), &random_symplectic(2, 6, 1.0));
        let scrambled = conjugate_cm(&two, &local).unwrap();
        let part = Bipartition::from_side_a(&[0, 1], 4).unwrap();
        let d = modewise_decompose(&scrambled, &part, &tol()).unwrap();
        assert_eq!(d.pairs.len(), 2);
        let (l, k) = (0.5 * 1.2_f64.cosh(), 0.5 * 1.2_f64.sinh());
        for p in &d.pairs {
            assert!((p.lambda - l).abs() < 1e-9);
            assert!((p.kappa - k).abs() < 1e-9);
        }
        assert!(d.residual_norm < 1e-9);
    }

    #[test]
    fn degeneracy_mismatch_is_reported() {
        // not a pure state: side A has λ = 2 once, side B never
        let mut body = RealMatrix::identity(4).scale(0.5);
        body[(0, 0)] = 2.0;
        body[(1, 1)] = 2.0;
        let m = CovarianceMatrix::new(body, 1e-12).unwrap();
        let part = Bipartition::from_side_a(&[0], 2).unwrap();
        let loose = Tolerances {
            isotropy: 1e3,
            ..Tolerances::default()
        };
        assert!(matches!(
            modewise_decompose(&m, &part, &loose),
            Err(Error::DegeneracyMismatch(_))
        ));
    }

    #[test]
    fn weak_pair_next_to_base_modes() {
        // λ − ½ ≈ 3e-8 sits inside the λ gap of the three vacuum modes on B
        let r = 1.7e-4;
        let m = CovarianceMatrix::new(
            tmss_cm(r)
                .unwrap()
                .matrix()
                .direct_sum(vacuum_cm(3).matrix()),
            1e-12,
        )
        .unwrap();
        let local_b = random_symplectic(4, 9, 1.0);
        let local = direct_sum(&SymplecticMatrix::identity(1), &local_b);
        let m = conjugate_cm(&m, &local).unwrap();
        let part = Bipartition::from_side_a(&[0], 5).unwrap();
        let d = modewise_decompose(&m, &part, &tol()).unwrap();
        assert_eq!(d.pairs.len(), 1);
        assert_eq!(d.residual_b, 3);
        assert!((d.pairs[0].kappa - 0.5 * (2.0 * r).sinh()).abs() < 1e-10);
        assert!(d.residual_norm < 1e-10, "{:e}", d.residual_norm);
    }
}
