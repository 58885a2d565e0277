//! Numerical checks of the converse machinery: the `mu`, `gamma`, `kappa`
//! parameter functions, the interval lemma, the self-information variance
//! bound, the probabilities of the sets `L` and `D`, and the telescoping
//! identity for differences of mutual informations.
//!
//! Everything here is deterministic arithmetic on explicit pmfs.

mod bounds;
mod params;
mod telescoping;

pub use bounds::{
    set_bound_checks, variance_bound_check, KeyPreconditions, SetBoundReport, VarianceCheck,
};
pub use params::{
    beta_for_mu, derive_params, interval_lemma, interval_lemma_check, Constraints,
    ConverseParams, IntervalCheck,
};
pub use telescoping::{
    telescoping_identity_check, TelescopingInstance, TelescopingReport, MAX_ALPHABET, MAX_BLOCK,
    TELESCOPING_TOL,
};
