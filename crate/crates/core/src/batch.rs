//! Batch evaluation over independent inputs.
//!
//! With the `parallel` feature (default) [`Execution::Parallel`] fans work
//! out over the rayon pool; without it every mode runs sequentially. Results
//! keep input order either way, so batch output is independent of the
//! execution mode.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::entanglement::{ppt_entangled, ppt_oracle, PptVerdict};
use crate::error::Result;
use crate::modewise::{modewise_decompose, Bipartition, EntangledPair, ModewiseDecomposition};
use crate::tolerance::Tolerances;
use crate::williamson::{
    symplectic_spectrum, williamson_decompose, CovarianceMatrix, SymplecticSpectrum,
    WilliamsonDecomposition,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Order-preserving map.
pub fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

pub fn spectra(
    exec: Execution,
    states: &[CovarianceMatrix],
    tol: &Tolerances,
) -> Vec<Result<SymplecticSpectrum>> {
    map(exec, states, |m| symplectic_spectrum(m, tol))
}

pub fn williamson_all(
    exec: Execution,
    states: &[CovarianceMatrix],
    tol: &Tolerances,
) -> Vec<Result<WilliamsonDecomposition>> {
    map(exec, states, |m| williamson_decompose(m, tol))
}

pub fn decompose_all(
    exec: Execution,
    cases: &[(CovarianceMatrix, Bipartition)],
    tol: &Tolerances,
) -> Vec<Result<ModewiseDecomposition>> {
    map(exec, cases, |(m, part)| modewise_decompose(m, part, tol))
}

/// One point of a PPT sweep: the printed criterion next to the
/// partial-transpose oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PptPoint {
    pub lambda0: f64,
    pub lambda: f64,
    pub verdict: PptVerdict,
    pub oracle_min: f64,
}

impl PptPoint {
    /// Criterion and oracle agree, or the point sits in the marginal band.
    pub fn agrees(&self) -> bool {
        self.verdict.marginal || self.verdict.entangled == (self.oracle_min < 0.5)
    }
}

/// `n × n` grid with `λ₀` evenly spaced over `lambda0_range` and, for each
/// `λ₀`, `λ` evenly spaced over `[λ₀, λ₀ + lambda_span]`.
pub fn ppt_grid(
    exec: Execution,
    lambda0_range: (f64, f64),
    lambda_span: f64,
    n: usize,
) -> Vec<Result<PptPoint>> {
    let step = |lo: f64, hi: f64, i: usize| {
        if n > 1 {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        } else {
            lo
        }
    };
    let points: Vec<(f64, f64)> = (0..n)
        .flat_map(|i| {
            let l0 = step(lambda0_range.0, lambda0_range.1, i);
            (0..n).map(move |j| (l0, step(l0, l0 + lambda_span, j)))
        })
        .collect();
    map(exec, &points, |&(lambda0, lambda)| {
        let pair = EntangledPair {
            lambda,
            kappa: ((lambda - lambda0) * (lambda + lambda0)).max(0.0).sqrt(),
            index_a: 0,
            index_b: 0,
        };
        Ok(PptPoint {
            lambda0,
            lambda,
            verdict: ppt_entangled(&pair, lambda0),
            oracle_min: ppt_oracle(&pair)?,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::random_pure_cm;

    #[test]
    fn modes_agree() {
        let states: Vec<_> = (0..16).map(|s| random_pure_cm(3, s, 1.0)).collect();
        let tol = Tolerances::default();
        let a: Vec<_> = spectra(Execution::Sequential, &states, &tol)
            .into_iter()
            .map(|r| r.unwrap())
            .collect();
        let b: Vec<_> = spectra(Execution::Parallel, &states, &tol)
            .into_iter()
            .map(|r| r.unwrap())
            .collect();
        assert_eq!(a, b);
    }

    #[test]
    fn small_ppt_grid_agrees() {
        let grid = ppt_grid(Execution::default(), (0.5, 2.0), 3.0, 7);
        assert_eq!(grid.len(), 49);
        assert!(grid.into_iter().all(|p| p.unwrap().agrees()));
    }
}
