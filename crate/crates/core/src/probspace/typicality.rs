//! Robust (relative-deviation) typicality.
//!
//! A tuple of sequences is typical for a reference law `P` when every
//! symbol tuple `a` satisfies `|N(a)/n - P(a)| <= eps P(a)`. Tuples with
//! `P(a) = 0` must not occur at all, and symbols outside the reference
//! alphabet are treated as such tuples.

use super::pmf::MultiPmf;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TypicalityParams {
    pub eps_typ: f64,
}

impl TypicalityParams {
    pub fn new(eps_typ: f64) -> Result<Self> {
        if !(eps_typ > 0.0 && eps_typ < 1.0) {
            return Err(Error::Validation(format!(
                "typicality tolerance must lie in (0, 1), got {eps_typ}"
            )));
        }
        Ok(TypicalityParams { eps_typ })
    }
}

/// The typicality rule on a table of joint counts over `n` positions.
#[inline]
pub fn counts_are_typical(counts: &[usize], reference: &[f64], n: usize, eps: f64) -> bool {
    let n = n as f64;
    counts.iter().zip(reference).all(|(&c, &p)| {
        if p == 0.0 {
            c == 0
        } else {
            (c as f64 / n - p).abs() <= eps * p
        }
    })
}

/// Joint counts of the symbol tuples in `seqs` over the axes of `dims`.
/// Returns `None` if some symbol falls outside its alphabet.
pub fn joint_counts(seqs: &[&[usize]], dims: &[usize]) -> Result<Option<Vec<usize>>> {
    if seqs.len() != dims.len() {
        return Err(Error::Dimension(format!(
            "{} sequences against a reference with {} axes",
            seqs.len(),
            dims.len()
        )));
    }
    let n = seqs.first().map_or(0, |s| s.len());
    if seqs.iter().any(|s| s.len() != n) {
        return Err(Error::Dimension("sequences differ in length".into()));
    }
    let mut counts = vec![0usize; dims.iter().product()];
    for t in 0..n {
        let mut idx = 0usize;
        for (s, &d) in seqs.iter().zip(dims) {
            let sym = s[t];
            if sym >= d {
                return Ok(None);
            }
            idx = idx * d + sym;
        }
        counts[idx] += 1;
    }
    Ok(Some(counts))
}

/// Robust joint typicality of `seqs` with respect to `reference`.
pub fn is_jointly_typical(
    seqs: &[&[usize]],
    reference: &MultiPmf,
    tp: &TypicalityParams,
) -> Result<bool> {
    let n = seqs.first().map_or(0, |s| s.len());
    if n == 0 {
        return Err(Error::Dimension("empty sequences".into()));
    }
    Ok(match joint_counts(seqs, reference.dims())? {
        Some(counts) => counts_are_typical(&counts, reference.probs(), n, tp.eps_typ),
        None => false,
    })
}
