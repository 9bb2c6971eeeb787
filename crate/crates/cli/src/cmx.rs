//! CMX text format for covariance and symplectic matrices.
//!
//! ```text
//! # free-form comment lines, kept verbatim
//! modes 2
//! ordering qp
//! 5.0000000000000000e-1 0.0000000000000000e0 ...
//! ...
//! ```
//!
//! Lines starting with `#` are comments and blank lines are skipped. The
//! first other line is `modes <k>`, optionally followed by `ordering qp`, then
//! exactly `2k` rows of `2k` numbers. Rows index the interleaved coordinates
//! `(q₀, p₀, q₁, p₁, …)`. Numbers are emitted with 17 significant digits so
//! every `f64` survives a round trip.

use std::fmt::Write as _;

use gaussmode::{CovarianceMatrix, RealMatrix};
use thiserror::Error;

/// Largest asymmetry absorbed by [`parse_cmx`], relative to `max(1, ||M||_max)`.
pub const ASYMMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CmxError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("bad header at line {line}: {message}")]
    BadHeader { line: usize, message: String },
    #[error("matrix asymmetry {asymmetry:e} exceeds {bound:e}")]
    Asymmetry { asymmetry: f64, bound: f64 },
}

/// A parsed document: comment lines without the leading `#`, and the body as
/// written.
#[derive(Debug, Clone, PartialEq)]
pub struct CmxDocument {
    pub comments: Vec<String>,
    pub modes: usize,
    pub body: RealMatrix,
}

/// A covariance matrix read from CMX, with the asymmetry the parser absorbed.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedCm {
    pub comments: Vec<String>,
    pub cm: CovarianceMatrix,
    pub asymmetry: f64,
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> CmxError {
    CmxError::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn header_err(line: usize, message: impl Into<String>) -> CmxError {
    CmxError::BadHeader {
        line,
        message: message.into(),
    }
}

/// `(1-based column, token)` for each whitespace-separated token.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    line.split_whitespace().map(move |tok| {
        let byte = tok.as_ptr() as usize - line.as_ptr() as usize;
        (line[..byte].chars().count() + 1, tok)
    })
}

/// Parses the document grammar without any symmetry requirement.
pub fn parse_document(text: &str) -> Result<CmxDocument, CmxError> {
    let mut comments = Vec::new();
    let mut modes: Option<usize> = None;
    let mut ordering_allowed = false;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim_end_matches('\r');
        let trimmed = line.trim_start();
        if let Some(comment) = trimmed.strip_prefix('#') {
            comments.push(comment.to_string());
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        let toks: Vec<(usize, &str)> = tokens(line).collect();
        let Some(k) = modes else {
            if toks[0].1 != "modes" {
                return Err(header_err(
                    line_no,
                    format!("expected `modes <k>`, found `{}`", toks[0].1),
                ));
            }
            if toks.len() != 2 {
                return Err(header_err(line_no, "expected `modes <k>`"));
            }
            let k: usize = toks[1].1.parse().map_err(|_| {
                header_err(
                    line_no,
                    format!("mode count `{}` is not an integer", toks[1].1),
                )
            })?;
            if k == 0 {
                return Err(header_err(line_no, "mode count must be positive"));
            }
            modes = Some(k);
            ordering_allowed = true;
            continue;
        };
        if toks[0].1 == "ordering" {
            if !ordering_allowed {
                return Err(header_err(
                    line_no,
                    "`ordering` must directly follow `modes`",
                ));
            }
            ordering_allowed = false;
            match toks.as_slice() {
                [_, (_, "qp")] => continue,
                [_, (_, other)] => {
                    return Err(header_err(
                        line_no,
                        format!("unsupported ordering `{other}`, only `qp`"),
                    ))
                }
                _ => return Err(header_err(line_no, "expected `ordering qp`")),
            }
        }
        ordering_allowed = false;
        let n = 2 * k;
        if rows.len() == n {
            return Err(parse_err(
                line_no,
                toks[0].0,
                format!("content after the {n} matrix rows"),
            ));
        }
        if toks.len() != n {
            let column = toks.get(n).map_or(line.chars().count() + 1, |t| t.0);
            return Err(parse_err(
                line_no,
                column,
                format!("expected {n} numbers, found {}", toks.len()),
            ));
        }
        let mut row = Vec::with_capacity(n);
        for (column, tok) in toks {
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(line_no, column, format!("`{tok}` is not a number")))?;
            if !v.is_finite() {
                return Err(parse_err(line_no, column, format!("`{tok}` is not finite")));
            }
            row.push(v);
        }
        rows.push(row);
    }

    let Some(k) = modes else {
        return Err(header_err(last_line.max(1), "missing `modes <k>` line"));
    };
    if rows.len() != 2 * k {
        return Err(parse_err(
            last_line + 1,
            1,
            format!("expected {} matrix rows, found {}", 2 * k, rows.len()),
        ));
    }
    let body = RealMatrix::from_rows(&rows).expect("rows are finite and rectangular");
    Ok(CmxDocument {
        comments,
        modes: k,
        body,
    })
}

/// Parses a covariance matrix, symmetrizing away asymmetry up to
/// [`ASYMMETRY_TOL`]` * max(1, ||M||_max)`.
pub fn parse_cmx(text: &str) -> Result<ParsedCm, CmxError> {
    let doc = parse_document(text)?;
    let asymmetry = doc.body.asymmetry();
    let bound = ASYMMETRY_TOL * doc.body.max_abs().max(1.0);
    if asymmetry > bound {
        return Err(CmxError::Asymmetry { asymmetry, bound });
    }
    let cm = CovarianceMatrix::new(doc.body, f64::INFINITY).expect("even square body");
    Ok(ParsedCm {
        comments: doc.comments,
        cm,
        asymmetry,
    })
}

fn number(v: f64) -> String {
    // -0 prints as 0 so equal matrices give equal text
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

/// Emits any `2k × 2k` matrix, each comment on its own `#` line.
pub fn emit_matrix(m: &RealMatrix, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push('#');
        out.push_str(c);
        out.push('\n');
    }
    let _ = writeln!(out, "modes {}", m.rows() / 2);
    out.push_str("ordering qp\n");
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|&v| number(v)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn emit_cmx(m: &CovarianceMatrix, comments: &[String]) -> String {
    emit_matrix(m.matrix(), comments)
}
