//! Exact evaluation of one codebook realization by enumerating every
//! source block pair.

use std::collections::BTreeMap;

use serde::Serialize;

use super::codebook::{build_from, Codebook, KIndex, RowDecode};
use super::config::{CardinalityCheck, CodebookDims, ProtocolConfig, RateCheck};
use crate::error::{Error, Result};
use crate::probspace::entropy_of;

/// Largest number of `(x^n, y^n)` pairs the analyzer enumerates.
pub const EXACT_PAIR_GUARD: f64 = (1u64 << 20) as f64;

/// Exact joint law of `(K, Y^n)`, with `y^n` indexed in base `|Y|`,
/// first coordinate least significant.
#[derive(Debug, Clone, PartialEq)]
pub struct KYJoint {
    pub y_count: usize,
    /// Distinct values of `K` with positive probability, ascending.
    pub k_values: Vec<KIndex>,
    /// `(index into k_values, y index, probability)`, positive cells only.
    pub cells: Vec<(usize, usize, f64)>,
}

impl KYJoint {
    pub fn k_pmf(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.k_values.len()];
        for &(k, _, v) in &self.cells {
            p[k] += v;
        }
        p
    }

    pub fn y_pmf(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.y_count];
        for &(_, y, v) in &self.cells {
            p[y] += v;
        }
        p
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactReport {
    pub n: usize,
    pub theta: f64,
    pub i_ux: f64,
    pub i_uy: f64,
    pub dims: CodebookDims,
    pub p_err: f64,
    pub p_encoder_fallback: f64,
    /// Bits.
    pub h_k: f64,
    pub h_k_given_y: f64,
    pub h_l: f64,
    /// `|H(K)/n - log2|K| / n|`.
    pub uniformity_gap: f64,
    pub cardinality: CardinalityCheck,
    pub rate_check: Option<RateCheck>,
    #[serde(skip)]
    pub joint_ky: KYJoint,
}

fn decode_digits(mut code: usize, base: usize, n: usize) -> Vec<usize> {
    (0..n)
        .map(|_| {
            let d = code % base;
            code /= base;
            d
        })
        .collect()
}

/// Exact `P[K != L]`, `H(K)`, `H(K|Y^n)` and `H(L)` for the codebook drawn
/// from `cfg.seed`, with the index error averaged in closed form.
pub fn exact_analyze(cfg: &ProtocolConfig) -> Result<ExactReport> {
    let d = cfg.derived()?;
    let (nx, ny, n) = (cfg.source.nx(), cfg.source.ny(), cfg.n);
    let pairs = (nx as f64).powi(n as i32) * (ny as f64).powi(n as i32);
    if pairs > EXACT_PAIR_GUARD {
        return Err(Error::Config(format!(
            "exact analysis would enumerate {pairs:.3e} block pairs (limit {EXACT_PAIR_GUARD:.0e}); \
             reduce n or use run_monte_carlo"
        )));
    }
    let cb = build_from(cfg, &d.dims, &d.p_u, &d.p_ux, &d.p_uy)?;
    analyze_codebook(cfg, &cb, &d.dims, d.iux, d.iuy)
}

pub(crate) fn analyze_codebook(
    cfg: &ProtocolConfig,
    cb: &Codebook,
    dims: &CodebookDims,
    iux: f64,
    iuy: f64,
) -> Result<ExactReport> {
    let (nx, ny, n) = (cfg.source.nx(), cfg.source.ny(), cfg.n);
    let eps = cfg.eps_typ;
    let theta = cfg.theta;
    let n1 = cb.n1();
    let xs_count = nx.pow(n as u32);
    let ys_count = ny.pow(n as u32);
    let mut counts = Vec::new();

    // Encoder output for every x.
    let phi: Vec<(KIndex, u64)> = (0..xs_count)
        .map(|code| {
            let x = decode_digits(code, nx, n);
            let mut out = (KIndex::Fallback, cb.fallback_index());
            'scan: for i in 1..=n1 {
                for j in 1..=cb.n2() {
                    if cb.ux_typical(cb.word(i, j), &x, eps, &mut counts) {
                        out = (KIndex::Word { i, j }, i);
                        break 'scan;
                    }
                }
            }
            out
        })
        .collect();
    // Decoder output for every y and every real row.
    let psi: Vec<Vec<KIndex>> = (0..ys_count)
        .map(|code| {
            let y = decode_digits(code, ny, n);
            (1..=n1)
                .map(|i| match cb.decode_row(&y, i, eps, &mut counts) {
                    RowDecode::Unique(j) => KIndex::Word { i, j },
                    _ => KIndex::Fallback,
                })
                .collect()
        })
        .collect();
    let decoded_rows: Vec<u64> = psi
        .iter()
        .map(|rows| rows.iter().filter(|k| !k.is_fallback()).count() as u64)
        .collect();
    let row_decode = |y: usize, i: u64| -> KIndex {
        if i == cb.fallback_index() {
            KIndex::Fallback
        } else {
            psi[y][(i - 1) as usize]
        }
    };

    let pxy = cfg.source.probs();
    let mut p_err = 0.0;
    let mut p_fallback = 0.0;
    let mut joint: BTreeMap<(KIndex, usize), f64> = BTreeMap::new();
    let mut p_l: BTreeMap<KIndex, f64> = BTreeMap::new();
    let mut p_y = vec![0.0; ys_count];
    let spread = theta / n1 as f64;
    for (xc, &(k, i_star)) in phi.iter().enumerate() {
        let x = decode_digits(xc, nx, n);
        for (yc, py) in p_y.iter_mut().enumerate() {
            let mut w = 1.0;
            let mut rest = yc;
            for &xt in &x {
                w *= pxy[xt * ny + rest % ny];
                rest /= ny;
            }
            if w == 0.0 {
                continue;
            }
            *py += w;
            *joint.entry((k, yc)).or_insert(0.0) += w;
            let own = row_decode(yc, i_star);
            match k {
                KIndex::Fallback => {
                    p_fallback += w;
                    p_err += w * spread * decoded_rows[yc] as f64;
                }
                KIndex::Word { .. } => {
                    let hit = if own == k { 1.0 - theta } else { 0.0 };
                    p_err += w * (1.0 - hit);
                }
            }
            // The own row with weight 1 - theta; the theta / N1 share of
            // every row is added per y below, so remove it here once.
            *p_l.entry(own).or_insert(0.0) += w * (1.0 - theta - spread);
        }
    }
    if spread > 0.0 {
        for (yc, &py) in p_y.iter().enumerate() {
            if py == 0.0 {
                continue;
            }
            for &l in &psi[yc] {
                *p_l.entry(l).or_insert(0.0) += py * spread;
            }
            *p_l.entry(KIndex::Fallback).or_insert(0.0) += py * spread;
        }
    }

    let k_values: Vec<KIndex> = {
        let mut v: Vec<KIndex> = joint.keys().map(|&(k, _)| k).collect();
        v.dedup();
        v
    };
    let cells: Vec<(usize, usize, f64)> = joint
        .iter()
        .map(|(&(k, y), &p)| (k_values.binary_search(&k).expect("key present"), y, p))
        .collect();
    let joint_ky = KYJoint {
        y_count: ys_count,
        k_values,
        cells,
    };
    let h_k = entropy_of(&joint_ky.k_pmf()).max(0.0);
    let h_ky = entropy_of(&joint_ky.cells.iter().map(|c| c.2).collect::<Vec<_>>());
    let h_y = entropy_of(&p_y);
    let h_l = entropy_of(&p_l.values().copied().collect::<Vec<_>>()).max(0.0);
    Ok(ExactReport {
        n,
        theta,
        i_ux: iux,
        i_uy: iuy,
        dims: *dims,
        p_err: p_err.clamp(0.0, 1.0),
        p_encoder_fallback: p_fallback,
        h_k,
        h_k_given_y: (h_ky - h_y).max(0.0),
        h_l,
        uniformity_gap: ((h_k - dims.k_card.log2) / n as f64).abs(),
        cardinality: cfg.cardinality_check()?,
        rate_check: cfg.rate_check()?,
        joint_ky,
    })
}
