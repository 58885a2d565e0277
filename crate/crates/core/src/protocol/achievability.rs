//! The four conditions an achievable rate must meet, evaluated on a
//! protocol result.

use serde::{Deserialize, Serialize};

use super::exact::ExactReport;
use super::montecarlo::MonteCarloReport;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AchievabilityParams {
    pub alpha: f64,
    /// Cardinality exponent: `|K| <= 2^{c n}`.
    pub c: f64,
    pub beta: f64,
    pub delta: f64,
    /// Target rate `H` in bits per symbol.
    pub h_target: f64,
    /// Slack for `|H(K) - H(L)| / n`, checked when `H(L)` is known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

impl AchievabilityParams {
    pub fn new(alpha: f64, c: f64, beta: f64, delta: f64, h_target: f64) -> Result<Self> {
        let p = AchievabilityParams {
            alpha,
            c,
            beta,
            delta,
            h_target,
            epsilon: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = Some(epsilon);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !(pos(self.alpha) && pos(self.beta) && pos(self.delta)) {
            return Err(Error::Validation("alpha, beta and delta must be positive".into()));
        }
        if !(self.c >= 0.0) || !self.h_target.is_finite() {
            return Err(Error::Validation("c must be nonnegative and H finite".into()));
        }
        if self.epsilon.is_some_and(|e| !(e > 0.0)) {
            return Err(Error::Validation("epsilon must be positive".into()));
        }
        Ok(())
    }
}

/// Quantities the conditions are evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionInputs {
    pub n: usize,
    pub p_err: f64,
    pub h_k: f64,
    pub log2_k_card: f64,
    pub h_l: Option<f64>,
    pub theta: Option<f64>,
}

impl From<&ExactReport> for ConditionInputs {
    fn from(r: &ExactReport) -> Self {
        ConditionInputs {
            n: r.n,
            p_err: r.p_err,
            h_k: r.h_k,
            log2_k_card: r.dims.k_card.log2,
            h_l: Some(r.h_l),
            theta: Some(r.theta),
        }
    }
}

impl MonteCarloReport {
    /// Inputs using the Miller-Madow entropy estimate for `H(K)`.
    pub fn condition_inputs(&self, theta: f64) -> ConditionInputs {
        ConditionInputs {
            n: self.n,
            p_err: self.p_err,
            h_k: self.entropy_k_miller_madow,
            log2_k_card: self.dims.k_card.log2,
            h_l: None,
            theta: Some(theta),
        }
    }
}

/// One inequality: `holds` iff `margin >= 0` (strictly `> 0` for the
/// rate condition).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Condition {
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub holds: bool,
}

impl Condition {
    fn at_most(value: f64, bound: f64) -> Self {
        Condition {
            value,
            bound,
            margin: bound - value,
            holds: value <= bound,
        }
    }

    fn greater(value: f64, bound: f64) -> Self {
        Condition {
            value,
            bound,
            margin: value - bound,
            holds: value > bound,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AchievabilityReport {
    /// `P[K != L] <= alpha`.
    pub error: Condition,
    /// `log2 |K| <= c n`.
    pub cardinality: Condition,
    /// `|H(K)/n - log2|K|/n| <= beta`.
    pub uniformity: Condition,
    /// `H(K)/n > H - delta`.
    pub rate: Condition,
    /// `|H(K) - H(L)| / n <= epsilon`, when both are available.
    pub entropy_match: Option<Condition>,
    /// `theta <= alpha / 2`.
    pub theta_pairing: Option<Condition>,
    pub all_hold: bool,
}

pub fn check_achievability_conditions(
    inputs: &ConditionInputs,
    params: &AchievabilityParams,
) -> AchievabilityReport {
    let n = inputs.n as f64;
    let error = Condition::at_most(inputs.p_err, params.alpha);
    let cardinality = Condition::at_most(inputs.log2_k_card, params.c * n);
    let uniformity = Condition::at_most(
        ((inputs.h_k - inputs.log2_k_card) / n).abs(),
        params.beta,
    );
    let rate = Condition::greater(inputs.h_k / n, params.h_target - params.delta);
    let entropy_match = match (inputs.h_l, params.epsilon) {
        (Some(h_l), Some(eps)) => Some(Condition::at_most((inputs.h_k - h_l).abs() / n, eps)),
        _ => None,
    };
    let theta_pairing = inputs
        .theta
        .map(|t| Condition::at_most(t, params.alpha / 2.0));
    let all_hold = error.holds && cardinality.holds && uniformity.holds && rate.holds;
    AchievabilityReport {
        error,
        cardinality,
        uniformity,
        rate,
        entropy_match,
        theta_pairing,
        all_hold,
    }
}
