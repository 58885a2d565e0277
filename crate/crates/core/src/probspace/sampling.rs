//! Sampling from finite distributions and type classes.

use rand::seq::SliceRandom;
use rand::Rng;

use super::pmf::{JointPmf, Pmf};
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Inverse-CDF sampler over `0..len`.
#[derive(Debug, Clone)]
pub struct Categorical {
    cumulative: Vec<f64>,
}

impl Categorical {
    pub fn new(probs: &[f64]) -> Self {
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = probs
            .iter()
            .map(|&p| {
                acc += p;
                acc
            })
            .collect();
        // Absorb rounding so the last positive entry catches u close to 1.
        if let Some(last) = probs.iter().rposition(|&p| p > 0.0) {
            for c in &mut cumulative[last..] {
                *c = f64::INFINITY;
            }
        }
        Categorical { cumulative }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        self.cumulative.partition_point(|&c| c <= u)
    }
}

/// Draws `n` i.i.d. pairs from `j` using `rng`.
pub fn sample_iid_with<R: Rng + ?Sized>(
    j: &JointPmf,
    n: usize,
    rng: &mut R,
) -> (Vec<usize>, Vec<usize>) {
    let cat = Categorical::new(j.probs());
    let ny = j.ny();
    (0..n)
        .map(|_| {
            let cell = cat.sample(rng);
            (cell / ny, cell % ny)
        })
        .unzip()
}

/// Draws `n` i.i.d. pairs from `j`; identical output for identical seeds.
pub fn sample_iid(j: &JointPmf, n: usize, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if n == 0 {
        return Err(Error::Validation("block length must be at least 1".into()));
    }
    Ok(sample_iid_with(j, n, &mut stream_rng(seed, 0)))
}

/// Draws `n` i.i.d. symbols from `p`.
pub fn sample_pmf_with<R: Rng + ?Sized>(p: &Pmf, n: usize, rng: &mut R) -> Vec<usize> {
    let cat = Categorical::new(p.probs());
    (0..n).map(|_| cat.sample(rng)).collect()
}

/// Largest-remainder quantization of `n p` to integer counts summing to `n`.
///
/// Ties between equal remainders go to the lower symbol index.
pub fn quantized_counts(p: &Pmf, n: usize) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::Validation("block length must be at least 1".into()));
    }
    if p.support_size() > n {
        return Err(Error::InfeasibleType(format!(
            "distribution has {} support points but the block length is {n}",
            p.support_size()
        )));
    }
    let scaled: Vec<f64> = p.probs().iter().map(|&q| q * n as f64).collect();
    let mut counts: Vec<usize> = scaled.iter().map(|s| s.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..counts.len()).filter(|&u| p.probs()[u] > 0.0).collect();
    order.sort_by(|&a, &b| {
        let ra = scaled[a] - scaled[a].floor();
        let rb = scaled[b] - scaled[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let deficit = n.checked_sub(assigned).ok_or_else(|| {
        Error::Invariant("quantization assigned more than n symbols".into())
    })?;
    for &u in order.iter().cycle().take(deficit) {
        counts[u] += 1;
    }
    Ok(counts)
}

/// Uniform random arrangement of the multiset with the given counts.
pub fn sample_arrangement_with<R: Rng + ?Sized>(counts: &[usize], rng: &mut R) -> Vec<usize> {
    let mut seq: Vec<usize> = counts
        .iter()
        .enumerate()
        .flat_map(|(u, &c)| std::iter::repeat(u).take(c))
        .collect();
    seq.shuffle(rng);
    seq
}

/// Uniformly random sequence from the type class of the quantized type of `p`.
pub fn sample_type_class(p: &Pmf, n: usize, seed: u64) -> Result<Vec<usize>> {
    let counts = quantized_counts(p, n)?;
    Ok(sample_arrangement_with(&counts, &mut stream_rng(seed, 0)))
}
