//! The typicality-based key generation protocol: typed random codebooks,
//! the encoder and its row index, a genie channel for the index, and the
//! row decoder. Runs are evaluated by Monte Carlo or, for short blocks,
//! exactly.

mod achievability;
mod codebook;
mod config;
mod ensemble;
mod exact;
mod montecarlo;

pub use achievability::{
    check_achievability_conditions, AchievabilityParams, AchievabilityReport, Condition,
    ConditionInputs,
};
pub use codebook::{build_codebook, decode_psi, encode_phi, transmit_index, Codebook, KIndex};
pub use config::{
    CardinalityCheck, CodeSize, CodebookDims, CodebookMode, ProtocolConfig, RateCheck,
    RunDescriptor, CODEBOOK_SYMBOL_GUARD,
};
pub use exact::{exact_analyze, ExactReport, KYJoint, EXACT_PAIR_GUARD};
pub use montecarlo::{
    run_monte_carlo, write_trials_csv, EventCounts, IndexLabel, MonteCarloReport, MonteCarloRun,
    RealizedMode, RowOutcome, TrialOutcome,
};
