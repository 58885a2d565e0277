//! Explicit codebook, typicality encoder and decoder, and the index genie.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{CodebookDims, ProtocolConfig, CODEBOOK_SYMBOL_GUARD};
use crate::error::{Error, Result};
use crate::probspace::sampling::sample_arrangement_with;
use crate::probspace::typicality::counts_are_typical;
use crate::probspace::{quantized_counts, TypicalityParams};
use crate::rng::{derive_seed, stream_rng};

/// Common-randomness value: a codeword cell or the fallback word.
/// Cell indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KIndex {
    Word { i: u64, j: u64 },
    Fallback,
}

impl KIndex {
    pub fn is_fallback(&self) -> bool {
        matches!(self, KIndex::Fallback)
    }
}

/// `N1 x N2` words of one type over `U`, plus the fallback word made of
/// the reserved symbol `u_card`.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    n: usize,
    n1: u64,
    n2: u64,
    u_card: usize,
    nx: usize,
    ny: usize,
    word_type: Vec<usize>,
    words: Vec<u8>,
    /// Reference laws over the extended `U` alphabet, row-major.
    ref_ux: Vec<f64>,
    ref_uy: Vec<f64>,
}

fn extend_reference(p: &[f64], cols: usize) -> Vec<f64> {
    let mut v = p.to_vec();
    v.extend(std::iter::repeat(0.0).take(cols));
    v
}

/// Draws `N1 N2` independent words uniformly from the type class of the
/// quantized `P_U`. Word `(i, j)` uses its own random stream, so the draw
/// does not depend on scheduling.
pub fn build_codebook(cfg: &ProtocolConfig) -> Result<Codebook> {
    let d = cfg.derived()?;
    build_from(cfg, &d.dims, &d.p_u, &d.p_ux, &d.p_uy)
}

pub(crate) fn build_from(
    cfg: &ProtocolConfig,
    dims: &CodebookDims,
    p_u: &crate::probspace::Pmf,
    p_ux: &[f64],
    p_uy: &[f64],
) -> Result<Codebook> {
    let symbols = dims.stored_symbols(cfg.n);
    let (n1, n2) = match (dims.n1.exact, dims.n2.exact) {
        (Some(a), Some(b)) if symbols <= CODEBOOK_SYMBOL_GUARD => (a, b),
        _ => {
            return Err(Error::Config(format!(
                "explicit codebook would hold {symbols:.3e} symbols (limit {CODEBOOK_SYMBOL_GUARD:.0e}); \
                 use a smaller n or the ensemble mode"
            )))
        }
    };
    let n = cfg.n;
    let word_type = quantized_counts(p_u, n)?;
    let seed = derive_seed(cfg.seed, "codebook");
    let total = (n1 * n2) as usize;
    let mut words = vec![0u8; total * n];
    words
        .par_chunks_mut(n)
        .enumerate()
        .for_each(|(w, out)| {
            let seq = sample_arrangement_with(&word_type, &mut stream_rng(seed, w as u64));
            for (o, s) in out.iter_mut().zip(seq) {
                *o = s as u8;
            }
        });
    Ok(Codebook {
        n,
        n1,
        n2,
        u_card: cfg.u_card(),
        nx: cfg.source.nx(),
        ny: cfg.source.ny(),
        word_type,
        words,
        ref_ux: extend_reference(p_ux, cfg.source.nx()),
        ref_uy: extend_reference(p_uy, cfg.source.ny()),
    })
}

fn typical(word: &[u8], seq: &[usize], cols: usize, reference: &[f64], eps: f64, counts: &mut [usize]) -> bool {
    counts.fill(0);
    for (&u, &s) in word.iter().zip(seq) {
        if s >= cols {
            return false;
        }
        counts[u as usize * cols + s] += 1;
    }
    counts_are_typical(counts, reference, word.len(), eps)
}

impl Codebook {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n1(&self) -> u64 {
        self.n1
    }

    pub fn n2(&self) -> u64 {
        self.n2
    }

    /// Index of the fallback row, `N1 + 1`.
    pub fn fallback_index(&self) -> u64 {
        self.n1 + 1
    }

    /// Symbol counts shared by every word.
    pub fn word_type(&self) -> &[usize] {
        &self.word_type
    }

    /// Word at 1-based cell `(i, j)`.
    pub fn word(&self, i: u64, j: u64) -> &[u8] {
        let w = ((i - 1) * self.n2 + (j - 1)) as usize;
        &self.words[w * self.n..(w + 1) * self.n]
    }

    pub fn fallback_word(&self) -> Vec<u8> {
        vec![self.u_card as u8; self.n]
    }

    pub fn sequence(&self, k: KIndex) -> Vec<u8> {
        match k {
            KIndex::Word { i, j } => self.word(i, j).to_vec(),
            KIndex::Fallback => self.fallback_word(),
        }
    }

    pub(crate) fn ux_typical(&self, word: &[u8], x: &[usize], eps: f64, counts: &mut Vec<usize>) -> bool {
        counts.resize((self.u_card + 1) * self.nx, 0);
        typical(word, x, self.nx, &self.ref_ux, eps, counts)
    }

    pub(crate) fn uy_typical(&self, word: &[u8], y: &[usize], eps: f64, counts: &mut Vec<usize>) -> bool {
        counts.resize((self.u_card + 1) * self.ny, 0);
        typical(word, y, self.ny, &self.ref_uy, eps, counts)
    }

    /// Outcome of the decoder on row `i` (1-based, `i <= N1`).
    pub(crate) fn decode_row(&self, y: &[usize], i: u64, eps: f64, counts: &mut Vec<usize>) -> RowDecode {
        let mut found: Option<u64> = None;
        for j in 1..=self.n2 {
            let w = self.word(i, j);
            if self.uy_typical(w, y, eps, counts) {
                match found {
                    None => found = Some(j),
                    // Repeated copies of the same sequence are one candidate.
                    Some(f) if self.word(i, f) == w => {}
                    Some(_) => return RowDecode::Ambiguous,
                }
            }
        }
        match found {
            Some(j) => RowDecode::Unique(j),
            None => RowDecode::Empty,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum RowDecode {
    Unique(u64),
    Empty,
    Ambiguous,
}

/// Encoder: the first word in row-major order that is jointly typical
/// with `x` under `P_UX`, with its row; `(Fallback, N1 + 1)` if none is.
pub fn encode_phi(cb: &Codebook, x: &[usize], tp: &TypicalityParams) -> Result<(KIndex, u64)> {
    if x.len() != cb.n {
        return Err(Error::Dimension(format!(
            "sequence of length {} for block length {}",
            x.len(),
            cb.n
        )));
    }
    let mut counts = Vec::new();
    for i in 1..=cb.n1 {
        for j in 1..=cb.n2 {
            if cb.ux_typical(cb.word(i, j), x, tp.eps_typ, &mut counts) {
                return Ok((KIndex::Word { i, j }, i));
            }
        }
    }
    Ok((KIndex::Fallback, cb.fallback_index()))
}

/// Decoder: the unique jointly `UY`-typical sequence in row `i_tilde`;
/// the fallback word if there is none, several, or `i_tilde = N1 + 1`.
pub fn decode_psi(cb: &Codebook, y: &[usize], i_tilde: u64, tp: &TypicalityParams) -> Result<KIndex> {
    if y.len() != cb.n {
        return Err(Error::Dimension(format!(
            "sequence of length {} for block length {}",
            y.len(),
            cb.n
        )));
    }
    if i_tilde == 0 || i_tilde > cb.fallback_index() {
        return Err(Error::Validation(format!(
            "index {i_tilde} outside 1..={}",
            cb.fallback_index()
        )));
    }
    if i_tilde == cb.fallback_index() {
        return Ok(KIndex::Fallback);
    }
    Ok(match cb.decode_row(y, i_tilde, tp.eps_typ, &mut Vec::new()) {
        RowDecode::Unique(j) => KIndex::Word { i: i_tilde, j },
        _ => KIndex::Fallback,
    })
}

/// Randomness of one index transmission: an error happens when `v < theta`,
/// and then the received index is the `r`-th of the other indices. Keeping
/// `(v, r)` fixed while varying `theta` couples runs across `theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct IndexNoise {
    pub v: f64,
    pub r: f64,
}

impl IndexNoise {
    pub(crate) fn draw<R: Rng + ?Sized>(rng: &mut R) -> Self {
        IndexNoise {
            v: rng.gen(),
            r: rng.gen(),
        }
    }

    /// Received index for `i_star` among `1..=n1 + 1`.
    pub(crate) fn apply(&self, i_star: u64, n1: u64, theta: f64) -> u64 {
        if self.v >= theta {
            return i_star;
        }
        let k = ((self.r * n1 as f64) as u64).min(n1 - 1) + 1;
        if k >= i_star {
            k + 1
        } else {
            k
        }
    }
}

/// Genie channel for the index: correct with probability `1 - theta`,
/// otherwise uniform over the `N1` other indices of `1..=N1 + 1`.
pub fn transmit_index(i_star: u64, n1: u64, theta: f64, seed: u64) -> Result<u64> {
    if !(theta >= 0.0 && theta < 1.0) {
        return Err(Error::Validation(format!("theta must lie in [0, 1), got {theta}")));
    }
    if n1 == 0 || i_star == 0 || i_star > n1 + 1 {
        return Err(Error::Validation(format!("index {i_star} outside 1..={}", n1 + 1)));
    }
    Ok(IndexNoise::draw(&mut stream_rng(seed, 0)).apply(i_star, n1, theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probspace::{JointPmf, Pmf};
    use crate::ucrcap::AuxiliaryChannel;

    fn small_cfg(seed: u64) -> ProtocolConfig {
        ProtocolConfig::new(
            JointPmf::dsbs(0.1).unwrap(),
            AuxiliaryChannel::identity(2),
            8,
            0.1,
            0.0,
            0.15,
            seed,
        )
        .unwrap()
    }

    #[test]
    fn words_share_the_type() {
        let cb = build_codebook(&small_cfg(3)).unwrap();
        assert_eq!((cb.n1(), cb.n2()), (71, 6));
        assert_eq!(cb.word_type(), &[4, 4]);
        for i in 1..=cb.n1() {
            for j in 1..=cb.n2() {
                assert_eq!(cb.word(i, j).iter().filter(|&&s| s == 0).count(), 4);
            }
        }
        assert_eq!(build_codebook(&small_cfg(3)).unwrap(), cb);
        assert_ne!(build_codebook(&small_cfg(4)).unwrap(), cb);
    }

    #[test]
    fn planted_word_is_found() {
        let cb = build_codebook(&small_cfg(3)).unwrap();
        let tp = TypicalityParams::new(0.15).unwrap();
        let x: Vec<usize> = cb.word(5, 2).iter().map(|&u| u as usize).collect();
        let (k, i) = encode_phi(&cb, &x, &tp).unwrap();
        assert!(i <= 5 && !k.is_fallback());
        // x with the wrong type matches no word
        let (k, i) = encode_phi(&cb, &[0; 8], &tp).unwrap();
        assert_eq!((k, i), (KIndex::Fallback, 72));
        assert_eq!(decode_psi(&cb, &x, 72, &tp).unwrap(), KIndex::Fallback);
    }

    #[test]
    fn identical_terminals_decode_the_sent_cell() {
        let cfg = ProtocolConfig::new(
            JointPmf::diagonal(&Pmf::uniform(2).unwrap()),
            AuxiliaryChannel::identity(2),
            8,
            0.1,
            0.0,
            0.15,
            2,
        )
        .unwrap();
        let cb = build_codebook(&cfg).unwrap();
        let tp = TypicalityParams::new(0.15).unwrap();
        let x: Vec<usize> = cb.word(3, 4).iter().map(|&u| u as usize).collect();
        let (k, i) = encode_phi(&cb, &x, &tp).unwrap();
        assert_eq!(decode_psi(&cb, &x, i, &tp).unwrap(), k);
    }

    #[test]
    fn fallback_word_is_never_typical() {
        let cfg = ProtocolConfig::new(
            JointPmf::product(&Pmf::uniform(2).unwrap(), &Pmf::uniform(2).unwrap()),
            AuxiliaryChannel::identity(2),
            4,
            0.01,
            0.0,
            0.5,
            0,
        );
        // independent terminals give I(U;Y) = 0
        assert!(cfg.is_err());
        let cb = build_codebook(&small_cfg(1)).unwrap();
        let mut counts = Vec::new();
        for x in 0..256usize {
            let xs: Vec<usize> = (0..8).map(|t| (x >> t) & 1).collect();
            assert!(!cb.ux_typical(&cb.fallback_word(), &xs, 0.99, &mut counts));
        }
    }

    #[test]
    fn genie_error_rate() {
        assert_eq!(transmit_index(1, 1, 0.0, 5).unwrap(), 1);
        let flips = (0..10_000u64)
            .filter(|&s| transmit_index(1, 1, 0.5, s).unwrap() != 1)
            .count();
        assert!((flips as f64 / 1e4 - 0.5).abs() < 0.02, "{flips}");
        let noise = IndexNoise { v: 0.0, r: 0.999 };
        assert_eq!(noise.apply(3, 5, 0.1), 6);
        assert_eq!(IndexNoise { v: 0.0, r: 0.0 }.apply(1, 5, 0.1), 2);
        assert!(transmit_index(1, 1, 1.0, 0).is_err());
    }
}
