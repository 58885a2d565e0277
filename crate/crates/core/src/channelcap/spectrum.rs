//! Information density and its empirical distribution (the information
//! spectrum) for block channels driven by i.i.d. inputs.

use std::io::{BufWriter, Write};

use rayon::prelude::*;
use serde::Serialize;

use super::kernel::ChannelKernel;
use crate::error::{Error, Result};
use crate::probspace::sampling::sample_pmf_with;
use crate::probspace::Pmf;
use crate::rng::stream_rng;

/// Spacing of the rate grid searched by [`inf_info_rate_estimate`].
pub const DEFAULT_GRID_STEP: f64 = 0.01;
pub const DEFAULT_DROP_TOL: f64 = 0.01;

/// Normalized information density `(1/n) i(t^n; z^n)` in bits per symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfoDensitySample {
    pub value: f64,
    pub n: usize,
}

/// `(1/n) [log2 W_n(z|t) - log2 P_{Z^n}(z)]` under the i.i.d. input `input`.
pub fn information_density(
    kernel: &dyn ChannelKernel,
    input: &Pmf,
    t: &[usize],
    z: &[usize],
) -> Result<InfoDensitySample> {
    let n = t.len();
    if n == 0 || z.len() != n {
        return Err(Error::Dimension(format!(
            "input block of length {n} paired with output block of length {}",
            z.len()
        )));
    }
    if input.len() != kernel.input_size() {
        return Err(Error::Dimension("input law does not match channel input alphabet".into()));
    }
    if t.iter().any(|&s| s >= kernel.input_size()) || z.iter().any(|&s| s >= kernel.output_size())
    {
        return Err(Error::Dimension("symbol outside channel alphabet".into()));
    }
    let out = kernel.log2_output_prob_iid(z, input);
    if out == f64::NEG_INFINITY {
        return Err(Error::UndefinedDensity("output block has zero probability".into()));
    }
    let lik = kernel.log2_likelihood(z, t);
    if lik == f64::NEG_INFINITY {
        return Err(Error::UndefinedDensity(
            "output block is impossible given the input block".into(),
        ));
    }
    Ok(InfoDensitySample {
        value: (lik - out) / n as f64,
        n,
    })
}

/// Empirical information spectrum at one block length.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumEstimate {
    n: usize,
    /// In draw order.
    values: Vec<f64>,
    #[serde(skip)]
    sorted: Vec<f64>,
}

impl SpectrumEstimate {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Validation("spectrum needs at least one sample".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("spectrum samples must be finite".into()));
        }
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        Ok(SpectrumEstimate { n, values, sorted })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Nearest-rank quantile; `q` is clamped to `[0, 1]`.
    pub fn quantile(&self, q: f64) -> f64 {
        let len = self.sorted.len();
        let rank = (q.clamp(0.0, 1.0) * len as f64).ceil() as usize;
        self.sorted[rank.saturating_sub(1).min(len - 1)]
    }

    /// Fraction of samples `<= r`.
    pub fn mass_below(&self, r: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= r) as f64 / self.sorted.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Sample standard deviation (divisor `len - 1`).
    pub fn std_dev(&self) -> f64 {
        let len = self.values.len();
        if len < 2 {
            return 0.0;
        }
        let m = self.mean();
        let ss: f64 = self.values.iter().map(|v| (v - m).powi(2)).sum();
        (ss / (len - 1) as f64).sqrt()
    }

    /// CSV with columns `sample_index,n,value_bits`.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = BufWriter::new(out);
        w.write_all(b"sample_index,n,value_bits\n")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{i},{},{v:?}", self.n)?;
        }
        w.flush()
    }
}

/// Draws `num_samples` blocks `t ~ input^n`, `z ~ kernel(t)` and records the
/// normalized information density of each. Sample `i` uses stream `i` of
/// `seed`, so the result does not depend on the thread count.
pub fn spectrum_samples(
    kernel: &dyn ChannelKernel,
    input: &Pmf,
    n: usize,
    num_samples: usize,
    seed: u64,
) -> Result<SpectrumEstimate> {
    if num_samples == 0 || n == 0 {
        return Err(Error::Validation(
            "spectrum needs a positive block length and sample count".into(),
        ));
    }
    let values = (0..num_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let t = sample_pmf_with(input, n, &mut rng);
            let z = kernel.sample_output(&t, &mut rng);
            information_density(kernel, input, &t, &z).map(|s| s.value)
        })
        .collect::<Result<Vec<f64>>>()?;
    SpectrumEstimate::new(n, values)
}

#[derive(Debug, Clone, Serialize)]
pub struct InfRateEstimate {
    /// Largest grid rate whose spectrum mass at the largest block length is
    /// at most `drop_tol`. A finite-sample estimate, not the limit itself.
    pub estimate: f64,
    /// Set when the mass below `estimate` fails to be non-increasing in `n`.
    pub inconclusive: bool,
    pub grid_step: f64,
    pub drop_tol: f64,
    pub block_lengths: Vec<usize>,
    /// Spectrum mass at or below `estimate`, per block length.
    pub mass_at_estimate: Vec<f64>,
}

/// Estimates the inf-information rate from spectra at increasing block
/// lengths by scanning the grid `0, step, 2 step, ...`.
pub fn inf_info_rate_estimate(
    spectra: &[SpectrumEstimate],
    drop_tol: f64,
    grid_step: f64,
) -> Result<InfRateEstimate> {
    if !(drop_tol > 0.0 && drop_tol < 1.0) {
        return Err(Error::Validation(format!("drop_tol must lie in (0, 1), got {drop_tol}")));
    }
    if !(grid_step > 0.0) {
        return Err(Error::Validation("grid step must be positive".into()));
    }
    let mut ordered: Vec<&SpectrumEstimate> = spectra.iter().collect();
    ordered.sort_by_key(|s| s.n());
    ordered.dedup_by_key(|s| s.n());
    if ordered.len() < 2 || ordered.len() != spectra.len() {
        return Err(Error::Validation(
            "need spectra at two or more distinct block lengths".into(),
        ));
    }
    let largest = ordered[ordered.len() - 1];
    let top = largest.quantile(1.0).max(0.0);
    let k_max = (top / grid_step).ceil() as usize + 1;
    // mass_below is nondecreasing, so admissible grid points form a prefix.
    let admissible = (0..=k_max)
        .take_while(|&k| largest.mass_below(k as f64 * grid_step) <= drop_tol)
        .last();
    let estimate = admissible.map_or(0.0, |k| k as f64 * grid_step);
    let mass_at_estimate: Vec<f64> = ordered.iter().map(|s| s.mass_below(estimate)).collect();
    let inconclusive = mass_at_estimate.windows(2).any(|w| w[1] > w[0]);
    Ok(InfRateEstimate {
        estimate,
        inconclusive,
        grid_step,
        drop_tol,
        block_lengths: ordered.iter().map(|s| s.n()).collect(),
        mass_at_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channelcap::kernel::{ChannelSpec, DmcProduct};
    use crate::probspace::{binary_entropy, ConditionalPmf};

    fn uniform2() -> Pmf {
        Pmf::uniform(2).unwrap()
    }

    #[test]
    fn noiseless_and_useless_densities() {
        let id = DmcProduct::new(ConditionalPmf::identity(2));
        let t = [0, 1, 1, 0, 1];
        assert_eq!(information_density(&id, &uniform2(), &t, &t).unwrap().value, 1.0);
        let useless = DmcProduct::new(ConditionalPmf::bsc(0.5).unwrap());
        assert_eq!(
            information_density(&useless, &uniform2(), &t, &[1, 1, 0, 0, 0]).unwrap().value,
            0.0
        );
    }

    #[test]
    fn two_point_density() {
        let bsc = DmcProduct::new(ConditionalPmf::bsc(0.1).unwrap());
        let same = information_density(&bsc, &uniform2(), &[0], &[0]).unwrap().value;
        let diff = information_density(&bsc, &uniform2(), &[0], &[1]).unwrap().value;
        assert!((same - (0.9f64 / 0.5).log2()).abs() < 1e-12);
        assert!((same - 0.848_00).abs() < 1e-5);
        assert!((diff - (0.1f64 / 0.5).log2()).abs() < 1e-12);
        assert!((diff + 2.321_93).abs() < 1e-5);
    }

    #[test]
    fn undefined_density() {
        let id = DmcProduct::new(ConditionalPmf::identity(2));
        let point = Pmf::point_mass(2, 0).unwrap();
        assert!(matches!(
            information_density(&id, &point, &[0], &[1]),
            Err(Error::UndefinedDensity(_))
        ));
    }

    #[test]
    fn identity_spectrum_is_a_point_mass() {
        let id = DmcProduct::new(ConditionalPmf::identity(2));
        let s = spectrum_samples(&id, &uniform2(), 50, 200, 1).unwrap();
        assert!(s.values().iter().all(|&v| v == 1.0));
        let s2 = spectrum_samples(&id, &uniform2(), 100, 200, 1).unwrap();
        let est = inf_info_rate_estimate(&[s, s2], DEFAULT_DROP_TOL, DEFAULT_GRID_STEP).unwrap();
        assert!((est.estimate - (1.0 - DEFAULT_GRID_STEP)).abs() < 1e-12);
        assert!(!est.inconclusive);
    }

    #[test]
    fn useless_channel_estimate() {
        let k = DmcProduct::new(ConditionalPmf::bsc(0.5).unwrap());
        let a = spectrum_samples(&k, &uniform2(), 50, 100, 3).unwrap();
        let b = spectrum_samples(&k, &uniform2(), 200, 100, 3).unwrap();
        let est = inf_info_rate_estimate(&[a, b], DEFAULT_DROP_TOL, DEFAULT_GRID_STEP).unwrap();
        assert!(est.estimate <= DEFAULT_GRID_STEP);
    }

    #[test]
    fn bsc_spectrum_mean() {
        let k = DmcProduct::new(ConditionalPmf::bsc(0.1).unwrap());
        let s = spectrum_samples(&k, &uniform2(), 1000, 10_000, 0x5eed).unwrap();
        assert!((s.mean() - (1.0 - binary_entropy(0.1))).abs() < 0.01);
    }

    #[test]
    fn mean_density_matches_mutual_information() {
        // asymmetric channel and input; mean within 3 standard errors
        let w = ConditionalPmf::new(2, 3, vec![0.7, 0.2, 0.1, 0.1, 0.3, 0.6]).unwrap();
        let input = Pmf::new(vec![0.35, 0.65]).unwrap();
        let mi = crate::probspace::channel_mutual_information(&input, &w).unwrap();
        let k = DmcProduct::new(w);
        let s = spectrum_samples(&k, &input, 40, 20_000, 17).unwrap();
        let se = s.std_dev() / (s.len() as f64).sqrt();
        assert!((s.mean() - mi).abs() <= 3.0 * se, "{} vs {mi}, se {se}", s.mean());
    }

    #[test]
    fn std_scales_like_inverse_sqrt_n() {
        let k = DmcProduct::new(ConditionalPmf::bsc(0.1).unwrap());
        let a = spectrum_samples(&k, &uniform2(), 250, 4000, 8).unwrap();
        let b = spectrum_samples(&k, &uniform2(), 1000, 4000, 9).unwrap();
        let ratio = b.std_dev() / a.std_dev();
        assert!((0.35..=0.65).contains(&ratio), "{ratio}");
    }

    #[test]
    fn mixed_channel_is_bimodal() {
        let spec = ChannelSpec::mixed(vec![
            (0.5, ChannelSpec::dmc(&ConditionalPmf::bsc(0.0).unwrap())),
            (0.5, ChannelSpec::dmc(&ConditionalPmf::bsc(0.5).unwrap())),
        ]);
        let k = spec.build().unwrap();
        let s = spectrum_samples(k.as_ref(), &uniform2(), 500, 10_000, 77).unwrap();
        let low = s.mass_below(0.1);
        assert!((0.4..=0.6).contains(&low), "{low}");
        assert!(s.mass_below(0.9) - low <= 0.05);
        let short = spectrum_samples(k.as_ref(), &uniform2(), 100, 10_000, 78).unwrap();
        let est = inf_info_rate_estimate(&[short, s], DEFAULT_DROP_TOL, DEFAULT_GRID_STEP).unwrap();
        assert!(est.estimate <= 0.05);
    }

    #[test]
    fn quantile_and_cdf_are_monotone() {
        let s = SpectrumEstimate::new(3, vec![0.5, -1.0, 2.0, 0.5, 1.0]).unwrap();
        let qs: Vec<f64> = (0..=20).map(|i| s.quantile(i as f64 / 20.0)).collect();
        assert!(qs.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(s.quantile(0.0), -1.0);
        assert_eq!(s.quantile(1.0), 2.0);
        assert_eq!(s.mass_below(-2.0), 0.0);
        assert_eq!(s.mass_below(0.5), 0.6);
        assert_eq!(s.mass_below(2.0), 1.0);
    }

    #[test]
    fn estimator_input_checks() {
        let s = SpectrumEstimate::new(3, vec![0.5]).unwrap();
        assert!(inf_info_rate_estimate(&[s.clone()], 0.01, 0.01).is_err());
        assert!(inf_info_rate_estimate(&[s.clone(), s.clone()], 0.01, 0.01).is_err());
        let t = SpectrumEstimate::new(6, vec![0.5]).unwrap();
        assert!(inf_info_rate_estimate(&[s, t], 1.5, 0.01).is_err());
    }

    #[test]
    fn non_monotone_evidence_is_flagged() {
        let a = SpectrumEstimate::new(10, vec![0.5; 100]).unwrap();
        let mut vals = vec![0.5; 100];
        vals[0] = 0.05;
        let b = SpectrumEstimate::new(20, vals).unwrap();
        let est = inf_info_rate_estimate(&[a, b], 0.02, 0.01).unwrap();
        assert!((est.estimate - 0.49).abs() < 1e-12);
        assert!(est.inconclusive);
    }
}
