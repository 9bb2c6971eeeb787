//! Machine- and human-readable modewise reports.
//!
//! JSON schema (key order fixed):
//!
//! ```text
//! {
//!   "lambda0": f64,
//!   "pairs": [
//!     { "lambda": f64, "kappa": f64, "beta": f64, "entropy": f64,
//!       "index_a": int, "index_b": int,
//!       "ppt": { "entangled": bool, "margin": f64, "marginal": bool } }
//!   ],
//!   "residual_a": int,
//!   "residual_b": int,
//!   "residual_norm": f64,
//!   "entropy_total": f64 | null
//! }
//! ```
//!
//! Entropies are in nats. `entropy_total` is `null` unless the state is pure.

use std::fmt::Write as _;

use gaussmode::entanglement::{ppt_entangled, EntropyReport};
use gaussmode::{beta_from_lambda, mode_entropy, ModewiseDecomposition, Result};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PptReport {
    pub entangled: bool,
    pub margin: f64,
    pub marginal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairReport {
    pub lambda: f64,
    pub kappa: f64,
    pub beta: f64,
    pub entropy: f64,
    pub index_a: usize,
    pub index_b: usize,
    pub ppt: PptReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModewiseReport {
    pub lambda0: f64,
    pub pairs: Vec<PairReport>,
    pub residual_a: usize,
    pub residual_b: usize,
    pub residual_norm: f64,
    pub entropy_total: Option<f64>,
}

impl ModewiseReport {
    pub fn new(d: &ModewiseDecomposition, entropy: Option<&EntropyReport>) -> Result<Self> {
        let mut pairs = Vec::with_capacity(d.pairs.len());
        for p in &d.pairs {
            let verdict = ppt_entangled(p, d.lambda0);
            pairs.push(PairReport {
                lambda: p.lambda,
                kappa: p.kappa,
                beta: beta_from_lambda(p.lambda)?.value(),
                entropy: mode_entropy(p.lambda)?,
                index_a: p.index_a,
                index_b: p.index_b,
                ppt: PptReport {
                    entangled: verdict.entangled,
                    margin: verdict.margin,
                    marginal: verdict.marginal,
                },
            });
        }
        Ok(Self {
            lambda0: d.lambda0,
            pairs,
            residual_a: d.residual_a,
            residual_b: d.residual_b,
            residual_norm: d.residual_norm,
            entropy_total: entropy.map(|e| e.total),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values are finite");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "lambda0        {:.12}", self.lambda0);
        let _ = writeln!(out, "pairs          {}", self.pairs.len());
        for (i, p) in self.pairs.iter().enumerate() {
            let _ = writeln!(
                out,
                "  pair {i}: A{} <-> B{}  lambda {:.12}  kappa {:.12}  beta {:.12}  entropy {:.12}",
                p.index_a, p.index_b, p.lambda, p.kappa, p.beta, p.entropy
            );
            let verdict = if p.ppt.entangled {
                "entangled"
            } else {
                "separable"
            };
            let marginal = if p.ppt.marginal { " (marginal)" } else { "" };
            let _ = writeln!(
                out,
                "          ppt {verdict}{marginal}  margin {:.6e}",
                p.ppt.margin
            );
        }
        let _ = writeln!(out, "residual_a     {}", self.residual_a);
        let _ = writeln!(out, "residual_b     {}", self.residual_b);
        let _ = writeln!(out, "residual_norm  {:.3e}", self.residual_norm);
        match self.entropy_total {
            Some(s) => {
                let _ = writeln!(out, "entropy_total  {s:.12} nats");
            }
            None => out.push_str("entropy_total  n/a (mixed state)\n"),
        }
        out
    }
}
