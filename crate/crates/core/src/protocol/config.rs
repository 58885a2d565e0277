//! Protocol parameters, codebook dimensions and the static checks that do
//! not need a simulation.

use serde::{Deserialize, Serialize};

use crate::channelcap::dmc_capacity;
use crate::error::{Error, Result};
use crate::probspace::{
    compose_aux, ConditionalPmf, ConditionalPmfDoc, JointPmf, JointPmfDoc, Pmf, AXIS_U, AXIS_X,
    AXIS_Y,
};
use crate::ucrcap::AuxiliaryChannel;

/// Largest explicit codebook, in stored symbols.
pub const CODEBOOK_SYMBOL_GUARD: f64 = 1e9;

/// How the codebook is realized in a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodebookMode {
    /// Explicit when it fits under [`CODEBOOK_SYMBOL_GUARD`], ensemble otherwise.
    #[default]
    Auto,
    /// One stored codebook realization; errors if it does not fit.
    Explicit,
    /// Random-coding ensemble simulated through type counting.
    Ensemble,
}

/// A codebook dimension that may be far beyond machine integers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CodeSize {
    /// `log2` of the size.
    pub log2: f64,
    /// The size itself when it fits in 63 bits.
    pub exact: Option<u64>,
}

impl CodeSize {
    /// `floor(2^e)` for `e >= 0`.
    fn floor_pow2(e: f64) -> Self {
        if e < 62.0 {
            let v = e.exp2().floor() as u64;
            CodeSize {
                log2: (v as f64).log2(),
                exact: Some(v),
            }
        } else {
            CodeSize {
                log2: e,
                exact: None,
            }
        }
    }

    /// Natural log of the size.
    pub fn ln(&self) -> f64 {
        self.log2 * std::f64::consts::LN_2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CodebookDims {
    /// `n [I(U;X) - I(U;Y) + 3 mu]`.
    pub exponent_n1: f64,
    /// `n [I(U;Y) - 2 mu]`.
    pub exponent_n2: f64,
    pub n1: CodeSize,
    pub n2: CodeSize,
    /// `|K| = N1 N2 + 1`.
    pub k_card: CodeSize,
}

impl CodebookDims {
    /// Dimensions from the formulas; errors when `N2 < 1`.
    pub fn compute(n: usize, mu: f64, iux: f64, iuy: f64) -> Result<Self> {
        let e1 = n as f64 * (iux - iuy + 3.0 * mu);
        let e2 = n as f64 * (iuy - 2.0 * mu);
        if !(e2 >= 0.0) {
            return Err(Error::Config(format!(
                "N2 = floor(2^{e2:.4}) < 1 because I(U;Y) - 2 mu = {:.6} <= 0; \
                 lower mu below I(U;Y)/2 = {:.6}",
                iuy - 2.0 * mu,
                iuy / 2.0
            )));
        }
        let n1 = CodeSize::floor_pow2(e1);
        let n2 = CodeSize::floor_pow2(e2);
        let k_card = match (n1.exact, n2.exact) {
            (Some(a), Some(b)) if a.checked_mul(b).is_some_and(|p| p < u64::MAX >> 1) => {
                let v = a * b + 1;
                CodeSize {
                    log2: (v as f64).log2(),
                    exact: Some(v),
                }
            }
            _ => {
                let l = n1.log2 + n2.log2;
                CodeSize {
                    log2: l + (-l).exp2().ln_1p() / std::f64::consts::LN_2,
                    exact: None,
                }
            }
        };
        Ok(CodebookDims {
            exponent_n1: e1,
            exponent_n2: e2,
            n1,
            n2,
            k_card,
        })
    }

    /// Symbols an explicit codebook of block length `n` would store.
    pub fn stored_symbols(&self, n: usize) -> f64 {
        (self.n1.log2 + self.n2.log2).exp2() * n as f64
    }
}

/// `|K| <= 2^{n [I(U;X) + mu + 1]}`, checked in the log domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CardinalityCheck {
    pub log2_k_card: f64,
    pub log2_bound: f64,
    pub holds: bool,
}

/// `log2(N1 + 1) / n <= C(W) - mu'` for the configured channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateCheck {
    pub index_rate: f64,
    pub capacity: f64,
    pub mu_prime: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone)]
pub struct ProtocolConfig {
    pub source: JointPmf,
    pub aux: AuxiliaryChannel,
    pub n: usize,
    pub mu: f64,
    pub theta: f64,
    pub eps_typ: f64,
    pub seed: u64,
    pub mode: CodebookMode,
    /// Channel carrying the index, for the rate check only.
    pub channel: Option<ConditionalPmf>,
    pub mu_prime: f64,
}

/// Source-derived quantities shared by the protocol routines.
#[derive(Debug, Clone)]
pub(crate) struct Derived {
    pub iux: f64,
    pub iuy: f64,
    pub p_u: Pmf,
    /// Reference laws, row-major over `(u, x)` and `(u, y)`.
    pub p_ux: Vec<f64>,
    pub p_uy: Vec<f64>,
    pub dims: CodebookDims,
}

impl ProtocolConfig {
    pub fn new(
        source: JointPmf,
        aux: AuxiliaryChannel,
        n: usize,
        mu: f64,
        theta: f64,
        eps_typ: f64,
        seed: u64,
    ) -> Result<Self> {
        let cfg = ProtocolConfig {
            source,
            aux,
            n,
            mu,
            theta,
            eps_typ,
            seed,
            mode: CodebookMode::Auto,
            channel: None,
            mu_prime: 0.0,
        };
        cfg.derived()?;
        Ok(cfg)
    }

    pub fn with_mode(mut self, mode: CodebookMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_channel(mut self, w: ConditionalPmf, mu_prime: f64) -> Self {
        self.channel = Some(w);
        self.mu_prime = mu_prime;
        self
    }

    pub fn u_card(&self) -> usize {
        self.aux.u_card()
    }

    pub fn dims(&self) -> Result<CodebookDims> {
        Ok(self.derived()?.dims)
    }

    pub(crate) fn derived(&self) -> Result<Derived> {
        if self.n == 0 {
            return Err(Error::Validation("block length must be at least 1".into()));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::Validation(format!("mu must be positive, got {}", self.mu)));
        }
        if !(self.theta >= 0.0 && self.theta < 1.0) {
            return Err(Error::Validation(format!(
                "theta must lie in [0, 1), got {}",
                self.theta
            )));
        }
        if !(self.eps_typ > 0.0 && self.eps_typ < 1.0) {
            return Err(Error::Validation(format!(
                "typicality tolerance must lie in (0, 1), got {}",
                self.eps_typ
            )));
        }
        if self.aux.x_card() != self.source.nx() {
            return Err(Error::Dimension(format!(
                "auxiliary channel has {} inputs but the source has {} X symbols",
                self.aux.x_card(),
                self.source.nx()
            )));
        }
        if self.u_card() >= u8::MAX as usize {
            return Err(Error::Validation(format!(
                "auxiliary alphabet of {} symbols leaves no room for the fallback symbol",
                self.u_card()
            )));
        }
        if self.mu_prime < 0.0 {
            return Err(Error::Validation("mu' must be nonnegative".into()));
        }
        let triple = compose_aux(&self.source, self.aux.cond())?;
        let iux = triple.mutual_information(&[AXIS_U], &[AXIS_X])?.max(0.0);
        let iuy = triple.mutual_information(&[AXIS_U], &[AXIS_Y])?.max(0.0);
        let dims = CodebookDims::compute(self.n, self.mu, iux, iuy)?;
        let p_u = Pmf::from_weights(triple.marginal(&[AXIS_U])?.probs().to_vec())?;
        Ok(Derived {
            iux,
            iuy,
            p_u,
            p_ux: triple.marginal(&[AXIS_U, AXIS_X])?.probs().to_vec(),
            p_uy: triple.marginal(&[AXIS_U, AXIS_Y])?.probs().to_vec(),
            dims,
        })
    }

    /// `|K| <= 2^{n [I(U;X) + mu + 1]}`.
    pub fn cardinality_check(&self) -> Result<CardinalityCheck> {
        let d = self.derived()?;
        let log2_bound = self.n as f64 * (d.iux + self.mu + 1.0);
        Ok(CardinalityCheck {
            log2_k_card: d.dims.k_card.log2,
            log2_bound,
            holds: d.dims.k_card.log2 <= log2_bound,
        })
    }

    /// Index-rate feasibility against the configured channel, if any.
    pub fn rate_check(&self) -> Result<Option<RateCheck>> {
        let Some(w) = &self.channel else {
            return Ok(None);
        };
        let d = self.derived()?;
        // log2(N1 + 1) without forming N1 + 1 when it is huge.
        let log2_n1p1 = match d.dims.n1.exact {
            Some(v) => ((v + 1) as f64).log2(),
            None => d.dims.n1.log2,
        };
        let index_rate = log2_n1p1 / self.n as f64;
        let capacity = dmc_capacity(w, 1e-9)?.capacity;
        Ok(Some(RateCheck {
            index_rate,
            capacity,
            mu_prime: self.mu_prime,
            feasible: index_rate <= capacity - self.mu_prime,
        }))
    }
}

/// JSON run descriptor for protocol simulations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunDescriptor {
    pub source: JointPmfDoc,
    /// Auxiliary channel; `U = X` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux: Option<ConditionalPmfDoc>,
    pub n: usize,
    pub mu: f64,
    pub theta: f64,
    pub eps_typ: f64,
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub mode: CodebookMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ConditionalPmfDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_prime: Option<f64>,
}

impl RunDescriptor {
    /// Config for this descriptor; `seed` overrides the descriptor's own.
    pub fn to_config(&self, seed: Option<u64>) -> Result<ProtocolConfig> {
        let source = self.source.to_joint()?;
        let aux = match &self.aux {
            Some(doc) => AuxiliaryChannel::new(doc.to_conditional()?),
            None => AuxiliaryChannel::identity(source.nx()),
        };
        let seed = seed.or(self.seed).unwrap_or(0);
        let mut cfg = ProtocolConfig::new(source, aux, self.n, self.mu, self.theta, self.eps_typ, seed)?
            .with_mode(self.mode);
        if let Some(w) = &self.channel {
            cfg = cfg.with_channel(w.to_conditional()?, self.mu_prime.unwrap_or(0.0));
            cfg.derived()?;
        }
        if self.trials == 0 {
            return Err(Error::Validation("trials must be at least 1".into()));
        }
        Ok(cfg)
    }
}
