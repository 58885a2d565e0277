//! Monte Carlo execution of the protocol.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::codebook::{build_from, Codebook, IndexNoise, KIndex, RowDecode};
use super::config::{
    CardinalityCheck, CodebookDims, CodebookMode, ProtocolConfig, RateCheck, CODEBOOK_SYMBOL_GUARD,
};
use super::ensemble::{binomial_low, prob_none, typical_tables, LnFactorial};
use crate::error::{Error, Result};
use crate::probspace::sampling::sample_iid_with;
use crate::rng::{derive_seed, stream_rng};

/// Which codebook realization a run used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RealizedMode {
    Explicit,
    Ensemble,
}

/// Index as logged per trial. Ensemble runs do not materialize row
/// numbers, only where the index points relative to the sent row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum IndexLabel {
    Index(u64),
    #[serde(rename = "sent_row")]
    SentRow,
    #[serde(rename = "other_row")]
    OtherRow,
    #[serde(rename = "fallback")]
    Fallback,
}

impl fmt::Display for IndexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexLabel::Index(i) => write!(f, "{i}"),
            IndexLabel::SentRow => f.write_str("sent_row"),
            IndexLabel::OtherRow => f.write_str("other_row"),
            IndexLabel::Fallback => f.write_str("fallback"),
        }
    }
}

/// What the decoder saw on the received row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowOutcome {
    /// The received index was the fallback index.
    NotScanned,
    Empty,
    Unique,
    Ambiguous,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub trial: u64,
    /// Explicit mode only.
    pub k_index: Option<KIndex>,
    pub l_index: Option<KIndex>,
    pub k_is_fallback: bool,
    pub l_is_fallback: bool,
    pub index_sent: IndexLabel,
    pub index_received: IndexLabel,
    pub index_error: bool,
    pub row: RowOutcome,
    pub agreed: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EventCounts {
    /// `K` is the fallback word.
    pub encoder_fallback: u64,
    /// Received index differs from the sent one.
    pub index_error: u64,
    /// Correct index, `K` a codeword, no typical word in the row.
    pub decoder_miss: u64,
    /// Correct index, `K` a codeword, several typical sequences in the row.
    pub decoder_ambiguous: u64,
    /// Correct index, `K` a codeword, a single typical sequence other than `K`.
    pub decoder_wrong: u64,
    /// Disagreements among trials with a correct index.
    pub errors_correct_index: u64,
    /// Disagreements among trials with an index error.
    pub errors_index_error: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloReport {
    pub mode: RealizedMode,
    pub n: usize,
    pub trials: u64,
    pub i_ux: f64,
    pub i_uy: f64,
    pub dims: CodebookDims,
    pub p_err: f64,
    /// Binomial standard error of `p_err`.
    pub p_err_std_err: f64,
    pub events: EventCounts,
    /// Plug-in entropy of the observed `K` values, in bits.
    pub entropy_k_plugin: f64,
    /// Plug-in value plus `(m - 1) / (2 N ln 2)` for `m` distinct values.
    /// Biased low whenever the trials do not cover the support of `K`.
    pub entropy_k_miller_madow: f64,
    pub distinct_k: u64,
    pub cardinality: CardinalityCheck,
    pub rate_check: Option<RateCheck>,
}

#[derive(Debug, Clone)]
pub struct MonteCarloRun {
    pub report: MonteCarloReport,
    pub outcomes: Vec<TrialOutcome>,
}

fn plugin_entropy<K>(counts: &BTreeMap<K, u64>, total: u64) -> f64 {
    let t = total as f64;
    counts
        .values()
        .map(|&c| {
            let p = c as f64 / t;
            -p * p.log2()
        })
        .sum()
}

/// Runs `trials` protocol executions over fresh source draws with one
/// codebook per run. Trial `t` always uses random stream `t`, so results
/// do not depend on the thread count.
pub fn run_monte_carlo(cfg: &ProtocolConfig, trials: u64) -> Result<MonteCarloRun> {
    if trials == 0 {
        return Err(Error::Validation("trials must be at least 1".into()));
    }
    let d = cfg.derived()?;
    let explicit_fits = d.dims.n1.exact.is_some()
        && d.dims.n2.exact.is_some()
        && d.dims.stored_symbols(cfg.n) <= CODEBOOK_SYMBOL_GUARD;
    let mode = match cfg.mode {
        CodebookMode::Explicit => RealizedMode::Explicit,
        CodebookMode::Ensemble => RealizedMode::Ensemble,
        CodebookMode::Auto if explicit_fits => RealizedMode::Explicit,
        CodebookMode::Auto => RealizedMode::Ensemble,
    };
    let seed = derive_seed(cfg.seed, "trials");
    let (outcomes, k_values): (Vec<TrialOutcome>, Vec<Vec<u8>>) = match mode {
        RealizedMode::Explicit => {
            let cb = build_from(cfg, &d.dims, &d.p_u, &d.p_ux, &d.p_uy)?;
            (0..trials)
                .into_par_iter()
                .map(|t| explicit_trial(cfg, &cb, t, &mut stream_rng(seed, t)))
                .unzip()
        }
        RealizedMode::Ensemble => {
            let sim = EnsembleSim::new(cfg, &d)?;
            (0..trials)
                .into_par_iter()
                .map(|t| sim.trial(t, &mut stream_rng(seed, t)))
                .unzip()
        }
    };

    let mut ev = EventCounts::default();
    for o in &outcomes {
        ev.encoder_fallback += o.k_is_fallback as u64;
        ev.index_error += o.index_error as u64;
        if !o.index_error && !o.k_is_fallback {
            match o.row {
                RowOutcome::Empty => ev.decoder_miss += 1,
                RowOutcome::Ambiguous => ev.decoder_ambiguous += 1,
                RowOutcome::Unique if !o.agreed => ev.decoder_wrong += 1,
                _ => {}
            }
        }
        if !o.agreed {
            if o.index_error {
                ev.errors_index_error += 1;
            } else {
                ev.errors_correct_index += 1;
            }
        }
    }
    let errors = ev.errors_correct_index + ev.errors_index_error;
    let p_err = errors as f64 / trials as f64;
    let mut counts: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
    for k in k_values {
        *counts.entry(k).or_insert(0) += 1;
    }
    let h = plugin_entropy(&counts, trials);
    let distinct = counts.len() as u64;
    let mm = h + (distinct as f64 - 1.0) / (2.0 * trials as f64 * std::f64::consts::LN_2);
    Ok(MonteCarloRun {
        report: MonteCarloReport {
            mode,
            n: cfg.n,
            trials,
            i_ux: d.iux,
            i_uy: d.iuy,
            dims: d.dims,
            p_err,
            p_err_std_err: (p_err * (1.0 - p_err) / trials as f64).sqrt(),
            events: ev,
            entropy_k_plugin: h,
            entropy_k_miller_madow: mm,
            distinct_k: distinct,
            cardinality: cfg.cardinality_check()?,
            rate_check: cfg.rate_check()?,
        },
        outcomes,
    })
}

/// `K` identity used for entropy counting: cell index bytes in explicit
/// mode, the word itself in ensemble mode.
fn index_key(k: KIndex) -> Vec<u8> {
    match k {
        KIndex::Word { i, j } => [i.to_be_bytes(), j.to_be_bytes()].concat(),
        KIndex::Fallback => Vec::new(),
    }
}

fn explicit_trial(
    cfg: &ProtocolConfig,
    cb: &Codebook,
    trial: u64,
    rng: &mut ChaCha8Rng,
) -> (TrialOutcome, Vec<u8>) {
    let eps = cfg.eps_typ;
    let (x, y) = sample_iid_with(&cfg.source, cfg.n, rng);
    let mut counts = Vec::new();
    let mut k = KIndex::Fallback;
    let mut i_star = cb.fallback_index();
    'scan: for i in 1..=cb.n1() {
        for j in 1..=cb.n2() {
            if cb.ux_typical(cb.word(i, j), &x, eps, &mut counts) {
                k = KIndex::Word { i, j };
                i_star = i;
                break 'scan;
            }
        }
    }
    let noise = IndexNoise::draw(rng);
    let i_tilde = noise.apply(i_star, cb.n1(), cfg.theta);
    let (l, row) = if i_tilde == cb.fallback_index() {
        (KIndex::Fallback, RowOutcome::NotScanned)
    } else {
        match cb.decode_row(&y, i_tilde, eps, &mut counts) {
            RowDecode::Unique(j) => (KIndex::Word { i: i_tilde, j }, RowOutcome::Unique),
            RowDecode::Empty => (KIndex::Fallback, RowOutcome::Empty),
            RowDecode::Ambiguous => (KIndex::Fallback, RowOutcome::Ambiguous),
        }
    };
    let outcome = TrialOutcome {
        trial,
        k_index: Some(k),
        l_index: Some(l),
        k_is_fallback: k.is_fallback(),
        l_is_fallback: l.is_fallback(),
        index_sent: IndexLabel::Index(i_star),
        index_received: IndexLabel::Index(i_tilde),
        index_error: i_tilde != i_star,
        row,
        agreed: k == l,
    };
    (outcome, index_key(k))
}

/// Simulator for the random-coding ensemble, for codebooks too large to
/// store. Each trial draws the source pair, then decides by exact type
/// counting whether any word of the (fresh, virtual) codebook is typical
/// with `x`, samples the first such word, and resolves the decoder's row
/// scan from the number of other row words typical with `y`.
///
/// Row words other than `K` are treated as independent of the encoder's
/// choice. In the actual ensemble the words scanned before `K` are
/// conditioned on not being typical with `x`; the induced change in the
/// impostor probability is of relative order `P[hit]`.
struct EnsembleSim<'a> {
    cfg: &'a ProtocolConfig,
    lf: LnFactorial,
    word_type: Vec<usize>,
    p_ux: Vec<f64>,
    p_uy: Vec<f64>,
    ln_words: f64,
    ln_row: f64,
    ln_row_minus_one: f64,
    /// Probability that a wrong real index is received as the fallback index.
    fallback_share: f64,
}

impl<'a> EnsembleSim<'a> {
    fn new(cfg: &'a ProtocolConfig, d: &super::config::Derived) -> Result<Self> {
        let word_type = crate::probspace::quantized_counts(&d.p_u, cfg.n)?;
        let ln_row = d.dims.n2.ln();
        let ln_row_minus_one = match d.dims.n2.exact {
            Some(1) => f64::NEG_INFINITY,
            Some(v) => ((v - 1) as f64).ln(),
            None => ln_row,
        };
        Ok(EnsembleSim {
            cfg,
            lf: LnFactorial::new(cfg.n),
            word_type,
            p_ux: d.p_ux.clone(),
            p_uy: d.p_uy.clone(),
            ln_words: d.dims.n1.ln() + ln_row,
            ln_row,
            ln_row_minus_one,
            fallback_share: (-d.dims.n1.log2).exp2(),
        })
    }

    fn symbol_counts(seq: &[usize], m: usize) -> Vec<usize> {
        let mut c = vec![0; m];
        seq.iter().for_each(|&s| c[s] += 1);
        c
    }

    fn uy_typical(&self, u: &[u8], y: &[usize]) -> bool {
        let ny = self.cfg.source.ny();
        let mut joint = vec![0usize; self.word_type.len() * ny];
        for (&a, &b) in u.iter().zip(y) {
            joint[a as usize * ny + b] += 1;
        }
        crate::probspace::typicality::counts_are_typical(&joint, &self.p_uy, u.len(), self.cfg.eps_typ)
    }

    fn trial(&self, trial: u64, rng: &mut ChaCha8Rng) -> (TrialOutcome, Vec<u8>) {
        let cfg = self.cfg;
        let (x, y) = sample_iid_with(&cfg.source, cfg.n, rng);
        let hit = typical_tables(
            &self.word_type,
            &Self::symbol_counts(&x, cfg.source.nx()),
            &self.p_ux,
            cfg.eps_typ,
            &self.lf,
        );
        let success = rng.gen::<f64>() >= prob_none(self.ln_words, hit.ln_prob);
        let k_word = if success {
            Some(hit.sample_partner(&x, rng))
        } else {
            None
        };
        let noise = IndexNoise::draw(rng);
        let d1: f64 = rng.gen();

        let index_error = noise.v < cfg.theta;
        let to_fallback = index_error && k_word.is_some() && noise.r < self.fallback_share;
        let ln_q = if to_fallback || (!index_error && k_word.is_none()) {
            f64::NEG_INFINITY
        } else {
            typical_tables(
                &self.word_type,
                &Self::symbol_counts(&y, cfg.source.ny()),
                &self.p_uy,
                cfg.eps_typ,
                &self.lf,
            )
            .ln_prob
        };
        let category = |ln_count: f64| {
            let (p0, p1) = binomial_low(ln_count, ln_q);
            if d1 < p0 {
                0
            } else if d1 < p0 + p1 {
                1
            } else {
                2
            }
        };

        let (index_sent, index_received, row, l_is_fallback, agreed) = match (&k_word, index_error) {
            (None, false) => (IndexLabel::Fallback, IndexLabel::Fallback, RowOutcome::NotScanned, true, true),
            (None, true) => {
                let others = category(self.ln_row);
                let row = [RowOutcome::Empty, RowOutcome::Unique, RowOutcome::Ambiguous][others];
                (IndexLabel::Fallback, IndexLabel::OtherRow, row, others != 1, others != 1)
            }
            (Some(_), true) if to_fallback => {
                (IndexLabel::SentRow, IndexLabel::Fallback, RowOutcome::NotScanned, true, false)
            }
            (Some(_), true) => {
                let others = category(self.ln_row);
                let row = [RowOutcome::Empty, RowOutcome::Unique, RowOutcome::Ambiguous][others];
                (IndexLabel::SentRow, IndexLabel::OtherRow, row, others != 1, false)
            }
            (Some(u), false) => {
                let own = self.uy_typical(u, &y) as usize;
                let typical = own + category(self.ln_row_minus_one);
                let row = match typical {
                    0 => RowOutcome::Empty,
                    1 => RowOutcome::Unique,
                    _ => RowOutcome::Ambiguous,
                };
                let agreed = own == 1 && typical == 1;
                (IndexLabel::SentRow, IndexLabel::SentRow, row, !(typical == 1), agreed)
            }
        };
        let outcome = TrialOutcome {
            trial,
            k_index: None,
            l_index: None,
            k_is_fallback: k_word.is_none(),
            l_is_fallback,
            index_sent,
            index_received,
            index_error,
            row,
            agreed,
        };
        (outcome, k_word.unwrap_or_default())
    }
}

/// Per-trial CSV: `trial,i_sent,i_received,k_is_fallback,agreed`.
pub fn write_trials_csv<W: Write>(outcomes: &[TrialOutcome], w: W) -> Result<()> {
    let io = |e: csv::Error| Error::Config(format!("writing trial CSV: {e}"));
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["trial", "i_sent", "i_received", "k_is_fallback", "agreed"])
        .map_err(io)?;
    for o in outcomes {
        wr.write_record([
            o.trial.to_string(),
            o.index_sent.to_string(),
            o.index_received.to_string(),
            o.k_is_fallback.to_string(),
            o.agreed.to_string(),
        ])
        .map_err(io)?;
    }
    wr.flush()
        .map_err(|e| Error::Config(format!("writing trial CSV: {e}")))?;
    Ok(())
}
