//! Capacity of a discrete memoryless channel by Blahut–Arimoto iteration.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::probspace::{ConditionalPmf, Pmf};

const MAX_ITERATIONS: usize = 1_000_000;

#[derive(Debug, Clone, Serialize)]
pub struct DmcCapacity {
    /// Mutual information of `input`, a lower bound on capacity.
    pub capacity: f64,
    /// `max_x D(W(.|x) || q)`, an upper bound on capacity.
    pub upper_bound: f64,
    #[serde(serialize_with = "ser_pmf")]
    pub input: Pmf,
    pub iterations: usize,
}

fn ser_pmf<S: serde::Serializer>(p: &Pmf, s: S) -> std::result::Result<S::Ok, S::Error> {
    p.probs().serialize(s)
}

/// Relative entropies `D(W(.|x) || q)` for every input symbol.
fn divergences(w: &ConditionalPmf, q: &[f64], out: &mut [f64]) {
    for (x, d) in out.iter_mut().enumerate() {
        *d = w
            .row(x)
            .iter()
            .zip(q)
            .filter(|(&wy, _)| wy > 0.0)
            .map(|(&wy, &qy)| wy * (wy / qy).log2())
            .sum();
    }
}

/// Single-letter capacity of `w` to within `tol` bits.
///
/// Iterates until the gap between the standard lower bound `I(p; W)` and
/// upper bound `max_x D(W(.|x) || pW)` is at most `tol`; the reported value
/// is the lower bound, so it is attained by the returned input law.
pub fn dmc_capacity(w: &ConditionalPmf, tol: f64) -> Result<DmcCapacity> {
    if !(tol > 0.0) {
        return Err(Error::Validation(format!("tolerance must be positive, got {tol}")));
    }
    let (nx, ny) = (w.n_in(), w.n_out());
    let mut p = vec![1.0 / nx as f64; nx];
    let mut q = vec![0.0; ny];
    let mut d = vec![0.0; nx];

    for iteration in 1..=MAX_ITERATIONS {
        q.iter_mut().for_each(|v| *v = 0.0);
        for (x, &px) in p.iter().enumerate() {
            for (qy, &wy) in q.iter_mut().zip(w.row(x)) {
                *qy += px * wy;
            }
        }
        divergences(w, &q, &mut d);
        let lower: f64 = p.iter().zip(&d).map(|(&px, &dx)| px * dx).sum();
        let upper = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if upper - lower <= tol {
            return Ok(DmcCapacity {
                capacity: lower.max(0.0),
                upper_bound: upper.max(0.0),
                input: Pmf::from_weights(p)?,
                iterations: iteration,
            });
        }
        // p(x) <- p(x) 2^{D(x)}, shifted by the max for stability
        let mut total = 0.0;
        for (px, &dx) in p.iter_mut().zip(&d) {
            *px *= (dx - upper).exp2();
            total += *px;
        }
        p.iter_mut().for_each(|px| *px /= total);
    }
    Err(Error::NotConverged(format!(
        "capacity bracket still wider than {tol} after {MAX_ITERATIONS} iterations"
    )))
}
