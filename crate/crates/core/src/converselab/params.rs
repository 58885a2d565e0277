use serde::Serialize;

use crate::error::{Error, Result};

/// Which of the standing requirements on `(alpha, kappa, mu)` hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Constraints {
    /// `0 < alpha < 1`.
    pub alpha: bool,
    /// `0 < kappa < 1/2`.
    pub kappa: bool,
    /// `0 < mu < 1`.
    pub mu: bool,
}

impl Constraints {
    pub fn all(&self) -> bool {
        self.alpha && self.kappa && self.mu
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConverseParams {
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    /// `beta + 2 beta c + beta^2`.
    pub mu_beta: f64,
    /// `2 sqrt(sqrt(mu) / (1 - sqrt(alpha)))`.
    pub gamma_ab: f64,
    /// `alpha + 1 - (1 - sqrt(mu) (1 - sqrt(alpha)))^2`.
    pub kappa_ab: f64,
    /// Spectrum slack in bits, supplied by the caller.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub constraints: Constraints,
}

impl ConverseParams {
    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = Some(epsilon);
        self
    }

    pub fn is_valid(&self) -> bool {
        self.constraints.all()
    }

    /// `4 mu / gamma^2`, the Chebyshev term shared by the set bounds.
    pub fn chebyshev_term(&self) -> f64 {
        4.0 * self.mu_beta / (self.gamma_ab * self.gamma_ab)
    }
}

fn mu_of(beta: f64, c: f64) -> f64 {
    beta + 2.0 * beta * c + beta * beta
}

/// The derived quantities with flags for the requirements. Constraint
/// failures are flags; only inputs outside the domain of the formulas
/// (nonpositive `alpha` or `beta`, negative `c`, non-finite) are errors.
pub fn derive_params(alpha: f64, beta: f64, c: f64) -> Result<ConverseParams> {
    if !(alpha > 0.0 && alpha.is_finite() && beta > 0.0 && beta.is_finite()) {
        return Err(Error::Validation(format!(
            "alpha and beta must be positive, got alpha = {alpha}, beta = {beta}"
        )));
    }
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::Validation(format!("c must be nonnegative, got {c}")));
    }
    let mu = mu_of(beta, c);
    let sa = alpha.sqrt();
    let gamma = 2.0 * (mu.sqrt() / (1.0 - sa)).sqrt();
    let kappa = alpha + 1.0 - (1.0 - mu.sqrt() * (1.0 - sa)).powi(2);
    let constraints = Constraints {
        alpha: alpha < 1.0,
        kappa: kappa > 0.0 && kappa < 0.5,
        mu: mu > 0.0 && mu < 1.0,
    };
    Ok(ConverseParams {
        alpha,
        beta,
        c,
        mu_beta: mu,
        gamma_ab: gamma,
        kappa_ab: kappa,
        epsilon: None,
        constraints,
    })
}

/// The `beta > 0` with `mu(beta) = mu` for the given `c`.
pub fn beta_for_mu(mu: f64, c: f64) -> Result<f64> {
    if !(mu > 0.0 && mu.is_finite() && c >= 0.0 && c.is_finite()) {
        return Err(Error::Validation(format!("need mu > 0 and c >= 0, got {mu}, {c}")));
    }
    let b = 1.0 + 2.0 * c;
    // positive root of beta^2 + b beta - mu, written to avoid cancellation
    Ok(2.0 * mu / (b + (b * b + 4.0 * mu).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalCheck {
    /// `4 mu / gamma^2`.
    pub ratio: f64,
    /// `1 - sqrt(alpha)`.
    pub upper: f64,
    pub holds: bool,
}

/// The chain `0 < 4 mu / gamma^2 < 1 - sqrt(alpha) < 1`, evaluated.
pub fn interval_lemma(p: &ConverseParams) -> IntervalCheck {
    let ratio = p.chebyshev_term();
    let upper = 1.0 - p.alpha.sqrt();
    IntervalCheck {
        ratio,
        upper,
        holds: 0.0 < ratio && ratio < upper && upper < 1.0,
    }
}

pub fn interval_lemma_check(p: &ConverseParams) -> bool {
    interval_lemma(p).holds
}
