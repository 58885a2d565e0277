use std::io::Write;

use serde::{Deserialize, Serialize};
use ucr_core::channelcap::{inf_info_rate_estimate, spectrum_samples, ChannelSpec, InfRateEstimate};
use ucr_core::probspace::PmfDoc;
use ucr_core::rng::derive_seed;
use ucr_core::Error;

use super::CommandResult;
use crate::error::{CliError, CliResult};

const QUANTILES: [f64; 5] = [0.01, 0.1, 0.5, 0.9, 0.99];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub channel: ChannelSpec,
    pub input: PmfDoc,
    pub n: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub drop_tol: f64,
    pub rate_step: f64,
    pub mass_below: Vec<f64>,
}

#[derive(Serialize)]
struct BlockSummary {
    n: usize,
    samples: usize,
    mean: f64,
    std_dev: f64,
    quantiles: Vec<(f64, f64)>,
    mass_below: Vec<(f64, f64)>,
}

#[derive(Serialize)]
struct Summary {
    blocks: Vec<BlockSummary>,
    /// `std(n_{k+1}) / std(n_k)` for consecutive block lengths.
    std_ratios: Vec<f64>,
    inf_rate: Option<InfRateEstimate>,
}

impl SpectrumConfig {
    pub fn run(&self) -> CliResult<CommandResult> {
        if self.n.is_empty() {
            return Err(CliError::Usage("--n needs at least one block length".into()));
        }
        let kernel = self.channel.build()?;
        let input = self.input.to_pmf()?;
        if input.len() != kernel.input_size() {
            return Err(Error::Dimension(format!(
                "input law has {} symbols, channel takes {}",
                input.len(),
                kernel.input_size()
            ))
            .into());
        }
        let spectra = self
            .n
            .iter()
            .map(|&n| {
                let seed = derive_seed(self.seed, &format!("spectrum/n={n}"));
                spectrum_samples(kernel.as_ref(), &input, n, self.samples, seed)
            })
            .collect::<ucr_core::Result<Vec<_>>>()?;

        let mut csv = Vec::new();
        let io = |e: std::io::Error| CliError::Invariant(format!("writing spectrum CSV: {e}"));
        csv.write_all(b"sample_index,n,value_bits\n").map_err(io)?;
        for s in &spectra {
            for (i, v) in s.values().iter().enumerate() {
                writeln!(csv, "{i},{},{v:?}", s.n()).map_err(io)?;
            }
        }

        let blocks: Vec<BlockSummary> = spectra
            .iter()
            .map(|s| BlockSummary {
                n: s.n(),
                samples: s.len(),
                mean: s.mean(),
                std_dev: s.std_dev(),
                quantiles: QUANTILES.iter().map(|&q| (q, s.quantile(q))).collect(),
                mass_below: self.mass_below.iter().map(|&r| (r, s.mass_below(r))).collect(),
            })
            .collect();
        let std_ratios = blocks.windows(2).map(|w| w[1].std_dev / w[0].std_dev).collect();
        let inf_rate = if spectra.len() >= 2 {
            Some(inf_info_rate_estimate(&spectra, self.drop_tol, self.rate_step)?)
        } else {
            None
        };
        Ok(CommandResult::new(&Summary {
            blocks,
            std_ratios,
            inf_rate,
        })
        .with_table("spectrum.csv", csv))
    }
}
