//! Uniform common-randomness (UCR) capacity of two-source models with a
//! one-way channel, information-spectrum estimates for block channels, and
//! a simulator for the typicality-based key generation protocol.
//!
//! Module map:
//!
//! * [`probspace`]: distributions, information measures, sampling, typicality.
//! * [`channelcap`]: DMC capacity, information density and spectra.
//! * [`ucrcap`]: the auxiliary-variable optimization giving the UCR capacity.
//! * [`protocol`]: codebooks, encoder/decoder, Monte Carlo and exact analysis.
//! * [`converselab`]: the quantitative lemmas behind the converse bound.
//!
//! All quantities are in bits.

pub mod channelcap;
pub mod converselab;
pub mod error;
pub mod probspace;
pub mod protocol;
pub mod rng;
pub mod ucrcap;

pub use error::{Error, Result};
