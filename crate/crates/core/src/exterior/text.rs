//! Plain-text form literals: one term per line, `i1,i2,...,im : coefficient`.
//!
//! Blank lines and lines starting with `#` are ignored. Indices may be given
//! in any order; they are sorted and the permutation sign is folded into the
//! coefficient. Repeated terms are summed.

use super::AlternatingForm;
use crate::error::{Error, Result};

/// Parses a form. The ambient dimension is `dim` if given, otherwise the
/// largest index that appears.
pub fn parse_form(text: &str, dim: Option<usize>) -> Result<AlternatingForm> {
    let mut terms: Vec<(usize, Vec<usize>, f64)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let line_no = lineno + 1;
        let err = |message: String| Error::Parse { line: line_no, message };
        let (lhs, rhs) = line.split_once(':').ok_or_else(|| err("expected `indices : coefficient`".into()))?;
        let coeff: f64 = rhs.trim().parse().map_err(|e| err(format!("bad coefficient `{}`: {e}", rhs.trim())))?;
        let lhs = lhs.trim();
        let indices = if lhs.is_empty() {
            Vec::new()
        } else {
            lhs.split(',')
                .map(|s| s.trim().parse::<usize>().map_err(|e| err(format!("bad index `{}`: {e}", s.trim()))))
                .collect::<Result<Vec<_>>>()?
        };
        if indices.contains(&0) {
            return Err(err("indices are 1-based".into()));
        }
        let mut sorted = indices.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(err(format!("index {} repeated within a term", w[0])));
        }
        if let Some((first_line, first, _)) = terms.first() {
            if first.len() != indices.len() {
                return Err(err(format!(
                    "degree {} differs from degree {} on line {first_line}",
                    indices.len(),
                    first.len()
                )));
            }
        }
        terms.push((line_no, indices, coeff));
    }
    let (_, first, _) = terms.first().ok_or(Error::Parse { line: 0, message: "no terms".into() })?;
    let degree = first.len();
    let max_index = terms.iter().flat_map(|(_, idx, _)| idx.iter().copied()).max().unwrap_or(0);
    let dim = match dim {
        Some(d) if d < max_index => {
            return Err(Error::IndexOutOfRange { index: max_index, dim: d });
        }
        Some(d) => d,
        None => max_index.max(degree),
    };
    AlternatingForm::from_terms(dim, degree, terms.into_iter().map(|(_, idx, c)| (idx, c)))
}

/// Canonical text: sorted multi-indices, shortest round-trip coefficients.
pub fn format_form(phi: &AlternatingForm) -> String {
    let mut out = String::new();
    for (key, c) in phi.terms() {
        out.push_str(&format!("{key} : {c}\n"));
    }
    out
}
