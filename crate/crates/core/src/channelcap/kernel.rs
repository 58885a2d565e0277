//! Block channels `W_n: T^n -> Z^n`.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::probspace::sampling::Categorical;
use crate::probspace::{ConditionalPmf, ConditionalPmfDoc, Pmf};
use crate::rng::stream_rng;

/// A block channel usable for information-spectrum work.
///
/// Besides sampling and likelihoods, a kernel must report the exact output
/// law `P_{Z^n}` induced by an i.i.d. input, which is what keeps the
/// information density free of a second layer of estimation.
pub trait ChannelKernel: Send + Sync + std::fmt::Debug {
    fn input_size(&self) -> usize;
    fn output_size(&self) -> usize;

    fn sample_output(&self, t: &[usize], rng: &mut dyn RngCore) -> Vec<usize>;

    /// `log2 W_n(z | t)`; `-inf` when the transition is impossible.
    fn log2_likelihood(&self, z: &[usize], t: &[usize]) -> f64;

    /// `log2 P_{Z^n}(z)` when `T^n` is i.i.d. with law `input`.
    fn log2_output_prob_iid(&self, z: &[usize], input: &Pmf) -> f64;

    fn block_likelihood(&self, z: &[usize], t: &[usize]) -> f64 {
        self.log2_likelihood(z, t).exp2()
    }

    fn sample_output_seeded(&self, t: &[usize], seed: u64) -> Vec<usize> {
        self.sample_output(t, &mut stream_rng(seed, 0))
    }
}

/// Memoryless use of a single-letter channel on every coordinate.
#[derive(Debug, Clone)]
pub struct DmcProduct {
    w: ConditionalPmf,
    rows: Vec<Categorical>,
}

impl DmcProduct {
    pub fn new(w: ConditionalPmf) -> Self {
        let rows = (0..w.n_in()).map(|x| Categorical::new(w.row(x))).collect();
        DmcProduct { w, rows }
    }

    pub fn single_letter(&self) -> &ConditionalPmf {
        &self.w
    }
}

impl ChannelKernel for DmcProduct {
    fn input_size(&self) -> usize {
        self.w.n_in()
    }

    fn output_size(&self) -> usize {
        self.w.n_out()
    }

    fn sample_output(&self, t: &[usize], rng: &mut dyn RngCore) -> Vec<usize> {
        t.iter().map(|&ti| self.rows[ti].sample(rng)).collect()
    }

    fn log2_likelihood(&self, z: &[usize], t: &[usize]) -> f64 {
        t.iter().zip(z).map(|(&ti, &zi)| self.w.get(ti, zi).log2()).sum()
    }

    fn log2_output_prob_iid(&self, z: &[usize], input: &Pmf) -> f64 {
        let out = match self.w.output_distribution(input) {
            Ok(out) => out,
            Err(_) => return f64::NEG_INFINITY,
        };
        z.iter().map(|&zi| out.probs()[zi].log2()).sum()
    }
}

/// Mixture of block channels; one branch is drawn per block and used for
/// every coordinate of that block.
#[derive(Debug)]
pub struct MixedChannel {
    weights: Pmf,
    branches: Vec<Box<dyn ChannelKernel>>,
    picker: Categorical,
}

impl MixedChannel {
    pub fn new(branches: Vec<(f64, Box<dyn ChannelKernel>)>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::Validation("mixed channel without branches".into()));
        }
        let (weights, branches): (Vec<f64>, Vec<_>) = branches.into_iter().unzip();
        let weights = Pmf::new(weights)?;
        let (ins, outs) = (branches[0].input_size(), branches[0].output_size());
        if branches
            .iter()
            .any(|b| b.input_size() != ins || b.output_size() != outs)
        {
            return Err(Error::Dimension(
                "mixed channel branches must share input and output alphabets".into(),
            ));
        }
        let picker = Categorical::new(weights.probs());
        Ok(MixedChannel {
            weights,
            branches,
            picker,
        })
    }

    pub fn weights(&self) -> &Pmf {
        &self.weights
    }
}

/// `log2(sum_b w_b 2^{l_b})`.
fn log2_mixture(terms: impl Iterator<Item = (f64, f64)>) -> f64 {
    let terms: Vec<(f64, f64)> = terms.filter(|(w, _)| *w > 0.0).collect();
    let top = terms.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    let s: f64 = terms.iter().map(|&(w, l)| w * (l - top).exp2()).sum();
    top + s.log2()
}

impl ChannelKernel for MixedChannel {
    fn input_size(&self) -> usize {
        self.branches[0].input_size()
    }

    fn output_size(&self) -> usize {
        self.branches[0].output_size()
    }

    fn sample_output(&self, t: &[usize], rng: &mut dyn RngCore) -> Vec<usize> {
        let b = self.picker.sample(rng);
        self.branches[b].sample_output(t, rng)
    }

    fn log2_likelihood(&self, z: &[usize], t: &[usize]) -> f64 {
        log2_mixture(
            self.weights
                .probs()
                .iter()
                .zip(&self.branches)
                .map(|(&w, b)| (w, b.log2_likelihood(z, t))),
        )
    }

    fn log2_output_prob_iid(&self, z: &[usize], input: &Pmf) -> f64 {
        log2_mixture(
            self.weights
                .probs()
                .iter()
                .zip(&self.branches)
                .map(|(&w, b)| (w, b.log2_output_prob_iid(z, input))),
        )
    }
}

/// JSON channel description: `{"kind": "dmc" | "mixed", "payload": ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "lowercase")]
pub enum ChannelSpec {
    Dmc(ConditionalPmfDoc),
    Mixed(MixedPayload),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixedPayload {
    pub branches: Vec<MixedBranch>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixedBranch {
    pub weight: f64,
    pub channel: ChannelSpec,
}

impl ChannelSpec {
    pub fn dmc(w: &ConditionalPmf) -> Self {
        ChannelSpec::Dmc(ConditionalPmfDoc::from_conditional(w))
    }

    pub fn mixed(branches: Vec<(f64, ChannelSpec)>) -> Self {
        ChannelSpec::Mixed(MixedPayload {
            branches: branches
                .into_iter()
                .map(|(weight, channel)| MixedBranch { weight, channel })
                .collect(),
        })
    }

    /// Single-letter matrix of a `dmc` description.
    pub fn as_dmc(&self) -> Result<ConditionalPmf> {
        match self {
            ChannelSpec::Dmc(doc) => doc.to_conditional(),
            ChannelSpec::Mixed(_) => Err(Error::Validation(
                "this operation needs a memoryless (\"dmc\") channel".into(),
            )),
        }
    }

    pub fn build(&self) -> Result<Box<dyn ChannelKernel>> {
        match self {
            ChannelSpec::Dmc(doc) => Ok(Box::new(DmcProduct::new(doc.to_conditional()?))),
            ChannelSpec::Mixed(payload) => {
                if payload.branches.is_empty() {
                    return Err(Error::Validation("mixed channel without branches".into()));
                }
                let branches = payload
                    .branches
                    .iter()
                    .map(|b| Ok((b.weight, b.channel.build()?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Box::new(MixedChannel::new(branches)?))
            }
        }
    }
}
