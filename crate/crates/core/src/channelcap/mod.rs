//! Channel-side quantities: single-letter capacity of memoryless channels,
//! information density and empirical information spectra.

pub mod capacity;
pub mod kernel;
pub mod spectrum;

pub use capacity::{dmc_capacity, DmcCapacity};
pub use kernel::{ChannelKernel, ChannelSpec, DmcProduct, MixedChannel};
pub use spectrum::{
    inf_info_rate_estimate, information_density, spectrum_samples, InfRateEstimate,
    InfoDensitySample, SpectrumEstimate, DEFAULT_DROP_TOL, DEFAULT_GRID_STEP,
};
