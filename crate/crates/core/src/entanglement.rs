//! Thermal parameters, mode entropies, two-mode-squeezed Schmidt profiles
//! and the partial-transpose test for the two-mode blocks.
//!
//! Entropies are in nats.

use crate::dense::RealMatrix;
use crate::error::{Error, Result};
use crate::modewise::{modewise_decompose, partial_cm, Bipartition, EntangledPair, Side};
use crate::states::pair_block;
use crate::tolerance::Tolerances;
use crate::williamson::{symplectic_spectrum, CovarianceMatrix};

/// Width of the band around the PPT boundary reported as marginal.
pub const PPT_MARGIN_TOL: f64 = 1e-9;

/// Below this distance from `1/2` the mode entropy uses its series expansion.
const ENTROPY_SERIES_CUTOFF: f64 = 1e-8;

/// `β = ln[(λ + ½)/(λ − ½)]`; `+∞` for a pure mode.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ThermalParameter(f64);

impl ThermalParameter {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::DomainError(format!(
                "beta must be positive, got {beta}"
            )));
        }
        Ok(Self(beta))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_pure(self) -> bool {
        self.0.is_infinite()
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.5) {
        return Err(Error::DomainError(format!(
            "symplectic eigenvalue {lambda} is below 1/2"
        )));
    }
    Ok(())
}

pub fn beta_from_lambda(lambda: f64) -> Result<ThermalParameter> {
    check_lambda(lambda)?;
    let x = lambda - 0.5;
    if x == 0.0 {
        return Ok(ThermalParameter(f64::INFINITY));
    }
    // ln(1 + 1/x)
    Ok(ThermalParameter((1.0 / x).ln_1p()))
}

/// `λ = ½ (e^β + 1)/(e^β − 1) = ½ + 1/(e^β − 1)`.
pub fn lambda_from_beta(beta: ThermalParameter) -> Result<f64> {
    if !(beta.0 > 0.0) {
        return Err(Error::DomainError(format!(
            "beta must be positive, got {}",
            beta.0
        )));
    }
    Ok(0.5 + 1.0 / beta.0.exp_m1())
}

/// Von Neumann entropy of a single-mode thermal state,
/// `(λ+½) ln(λ+½) − (λ−½) ln(λ−½)`.
pub fn mode_entropy(lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let x = lambda - 0.5;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < ENTROPY_SERIES_CUTOFF {
        return Ok(entropy_series(x));
    }
    Ok(entropy_direct(x))
}

/// `(x + 1) ln(x + 1) − x ln x`, rearranged to avoid cancellation.
fn entropy_direct(x: f64) -> f64 {
    x.ln_1p() + x * (1.0 / x).ln_1p()
}

/// Leading terms of [`entropy_direct`] at small `x`.
fn entropy_series(x: f64) -> f64 {
    x - x * x.ln() + 0.5 * x * x
}

/// Schmidt weights `p_n = (1 − e^{−β}) e^{−βn}` of a two-mode squeezed state.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtProfile {
    pub beta: ThermalParameter,
    pub coefficients: Vec<f64>,
    /// `1 − Σ p_n = e^{−β (n_max + 1)}`.
    pub truncation_mass: f64,
}

impl SchmidtProfile {
    /// Shannon entropy `−Σ p_n ln p_n` of the retained weights.
    pub fn entropy(&self) -> f64 {
        -self
            .coefficients
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.ln())
            .sum::<f64>()
    }
}

const MAX_SCHMIDT_TERMS: usize = 50_000_000;

/// Geometric Schmidt profile truncated at the first `n_max` whose tail mass
/// `e^{−β(n_max + 1)}` is at most `mass_tol`.
pub fn tmss_schmidt(beta: ThermalParameter, mass_tol: f64) -> Result<SchmidtProfile> {
    if !(mass_tol > 0.0 && mass_tol < 1.0) {
        return Err(Error::DomainError(format!(
            "truncation mass must lie in (0, 1), got {mass_tol}"
        )));
    }
    let b = beta.value();
    if !(b > 0.0) {
        return Err(Error::DomainError(format!(
            "beta must be positive, got {b}"
        )));
    }
    if beta.is_pure() {
        return Ok(SchmidtProfile {
            beta,
            coefficients: vec![1.0],
            truncation_mass: 0.0,
        });
    }
    let terms = (-mass_tol.ln() / b).ceil().max(1.0);
    if terms > MAX_SCHMIDT_TERMS as f64 {
        return Err(Error::DomainError(format!(
            "beta = {b} needs {terms} Schmidt terms for tail mass {mass_tol}"
        )));
    }
    let mut terms = terms as usize;
    // guard against ceil landing one short through rounding of ln
    while (-(b * terms as f64)).exp() > mass_tol {
        terms += 1;
    }
    let norm = -(-b).exp_m1();
    let coefficients = (0..terms).map(|n| norm * (-b * n as f64).exp()).collect();
    Ok(SchmidtProfile {
        beta,
        coefficients,
        truncation_mass: (-b * terms as f64).exp(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairEntropy {
    pub lambda: f64,
    pub entropy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport {
    /// From the reduced spectrum of side A.
    pub total: f64,
    /// From the modewise pairs (plus any near-decoupled modes folded into
    /// the residual block).
    pub pair_sum: f64,
    pub pairs: Vec<PairEntropy>,
}

/// `|λ − ½|` at or below which a computed mode counts as exactly pure.
/// Spectrum rounding near `½` is amplified by the `-x ln x` term; snapping
/// costs at most `3e-12` nats per mode.
pub const PURE_SNAP: f64 = 1e-13;

fn clamped_entropy(lambda: f64) -> Result<f64> {
    // rounding can also put a pure mode a hair below 1/2
    if (0.5 - 1e-9..=0.5 + PURE_SNAP).contains(&lambda) {
        return Ok(0.0);
    }
    mode_entropy(lambda)
}

/// Entanglement entropy of a pure state across `part`, computed both as the
/// sum over modewise pairs and from the reduced spectrum of side A; the two
/// must agree to `1e-8`.
pub fn entanglement_entropy(
    m: &CovarianceMatrix,
    part: &Bipartition,
    tol: &Tolerances,
) -> Result<EntropyReport> {
    let full = symplectic_spectrum(m, tol)?;
    if let Some(&bad) = full
        .values()
        .iter()
        .find(|&&l| (l - 0.5).abs() > tol.purity)
    {
        return Err(Error::NotPure { lambda: bad });
    }
    let d = modewise_decompose(m, part, tol)?;
    let mut pairs = Vec::with_capacity(d.pairs.len());
    let mut pair_sum = 0.0;
    for p in &d.pairs {
        let entropy = clamped_entropy(p.lambda)?;
        pair_sum += entropy;
        pairs.push(PairEntropy {
            lambda: p.lambda,
            entropy,
        });
    }
    for &i in &d.residual_modes_a {
        pair_sum += clamped_entropy(d.spectrum_a.values()[i])?;
    }

    let reduced_spec = symplectic_spectrum(&partial_cm(m, part, Side::A)?, tol)?;
    let mut reduced = 0.0;
    for &l in reduced_spec.values() {
        reduced += clamped_entropy(l)?;
    }
    if (pair_sum - reduced).abs() > 1e-8 * reduced.max(1.0) {
        return Err(Error::InconsistentEntropy { pair_sum, reduced });
    }
    Ok(EntropyReport {
        total: reduced,
        pair_sum,
        pairs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PptVerdict {
    pub entangled: bool,
    /// `λ − (λ₀² + ¼)`.
    pub margin: f64,
    /// Within [`PPT_MARGIN_TOL`] of the boundary; classified separable.
    pub marginal: bool,
}

/// Entangled iff `λ > λ₀² + ¼`; the boundary band counts as separable.
pub fn ppt_entangled(pair: &EntangledPair, lambda0: f64) -> PptVerdict {
    let margin = pair.lambda - (lambda0 * lambda0 + 0.25);
    PptVerdict {
        entangled: margin > PPT_MARGIN_TOL,
        margin,
        marginal: margin.abs() <= PPT_MARGIN_TOL,
    }
}

/// Minimum symplectic eigenvalue of the partially transposed two-mode block
/// (momentum of B flipped). Below `1/2` means entangled.
pub fn ppt_oracle(pair: &EntangledPair) -> Result<f64> {
    let block = pair_block(pair.lambda, pair.kappa);
    let flip = RealMatrix::from_diag(&[1.0, 1.0, 1.0, -1.0]);
    let transposed = CovarianceMatrix::new(&(&flip * &block) * &flip, 0.0)?;
    Ok(symplectic_spectrum(&transposed, &Tolerances::default())?.min())
}
