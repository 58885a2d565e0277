//! Entropy and mutual information in bits.

use super::pmf::{ConditionalPmf, JointPmf, MultiPmf, Pmf};
use crate::error::{Error, Result};

/// `-p log2 p` with `0 log 0 = 0`.
#[inline]
pub fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Entropy of raw probabilities, no validation.
pub fn entropy_of(probs: &[f64]) -> f64 {
    probs.iter().map(|&p| plogp(p)).sum()
}

/// Binary entropy function.
pub fn binary_entropy(p: f64) -> f64 {
    plogp(p) + plogp(1.0 - p)
}

pub fn entropy(p: &Pmf) -> f64 {
    entropy_of(p.probs())
}

/// `I(X;Y) = H(X) + H(Y) - H(X,Y)`, clamped at zero.
pub fn mutual_information(j: &JointPmf) -> f64 {
    let hx = entropy(&j.marginal_x());
    let hy = entropy(&j.marginal_y());
    let hxy = entropy_of(j.probs());
    (hx + hy - hxy).max(0.0)
}

/// `H(X|Y)`.
pub fn conditional_entropy_x_given_y(j: &JointPmf) -> f64 {
    (entropy_of(j.probs()) - entropy(&j.marginal_y())).max(0.0)
}

/// Mutual information between an input law and a channel.
pub fn channel_mutual_information(input: &Pmf, w: &ConditionalPmf) -> Result<f64> {
    Ok(mutual_information(&JointPmf::from_input_and_channel(input, w)?))
}

impl MultiPmf {
    /// Joint entropy of the variables on `axes`.
    pub fn entropy(&self, axes: &[usize]) -> Result<f64> {
        Ok(entropy_of(self.marginal(axes)?.probs()))
    }

    /// `I(A; B | C)` for disjoint axis groups, not clamped.
    pub fn conditional_mutual_information(
        &self,
        a: &[usize],
        b: &[usize],
        c: &[usize],
    ) -> Result<f64> {
        let overlap = a
            .iter()
            .any(|x| b.contains(x) || c.contains(x))
            || b.iter().any(|x| c.contains(x));
        if overlap {
            return Err(Error::Dimension("axis groups must be disjoint".into()));
        }
        let join = |groups: &[&[usize]]| groups.concat();
        let hac = self.entropy(&join(&[a, c]))?;
        let hbc = self.entropy(&join(&[b, c]))?;
        let habc = self.entropy(&join(&[a, b, c]))?;
        let hc = self.entropy(c)?;
        Ok(hac + hbc - habc - hc)
    }

    pub fn mutual_information(&self, a: &[usize], b: &[usize]) -> Result<f64> {
        self.conditional_mutual_information(a, b, &[])
    }
}

/// Axis positions of the triple returned by [`compose_aux`].
pub const AXIS_U: usize = 0;
pub const AXIS_X: usize = 1;
pub const AXIS_Y: usize = 2;

/// `P(u, x, y) = P(u | x) P(x, y)`: attaches an auxiliary variable to the
/// `X` side of a source, so `U - X - Y` is Markov by construction.
pub fn compose_aux(source: &JointPmf, aux: &ConditionalPmf) -> Result<MultiPmf> {
    if aux.n_in() != source.nx() {
        return Err(Error::Dimension(format!(
            "auxiliary channel has {} input rows but the source X alphabet has {} symbols",
            aux.n_in(),
            source.nx()
        )));
    }
    let (nu, nx, ny) = (aux.n_out(), source.nx(), source.ny());
    let mut probs = vec![0.0; nu * nx * ny];
    for u in 0..nu {
        for x in 0..nx {
            let w = aux.get(x, u);
            for y in 0..ny {
                probs[(u * nx + x) * ny + y] = w * source.get(x, y);
            }
        }
    }
    MultiPmf::from_weights(vec![nu, nx, ny], probs)
}
