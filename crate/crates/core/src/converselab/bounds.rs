//! Finite-n evaluation of the self-information variance bound and the
//! probabilities of the sets `L` and `D`. These bounds are asymptotic, so
//! each report carries its margin and a verdict only when the standing
//! preconditions are certified.

use serde::Serialize;

use super::params::ConverseParams;
use crate::error::{Error, Result};
use crate::probspace::{entropy_of, Pmf};
use crate::protocol::KYJoint;

/// Preconditions on the key distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KeyPreconditions {
    /// At least three keys with positive probability.
    pub support: bool,
    /// `log2 |K| <= c n`.
    pub cardinality: bool,
    /// `|H(K)/n - log2|K|/n| <= beta`.
    pub uniformity: bool,
    /// The parameters satisfy their standing requirements.
    pub params: bool,
}

impl KeyPreconditions {
    fn evaluate(
        support: usize,
        h_k: f64,
        log2_k_card: f64,
        n: usize,
        p: &ConverseParams,
    ) -> Self {
        let n = n as f64;
        KeyPreconditions {
            support: support >= 3,
            cardinality: log2_k_card <= p.c * n,
            uniformity: ((h_k - log2_k_card) / n).abs() <= p.beta,
            params: p.is_valid(),
        }
    }

    pub fn certified(&self) -> bool {
        self.support && self.cardinality && self.uniformity && self.params
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceCheck {
    /// `var[(1/n) log2 (1 / P_K(K))]`.
    pub lhs: f64,
    /// `mu(beta)`.
    pub rhs: f64,
    pub margin: f64,
    pub preconditions: KeyPreconditions,
    /// `None` when the preconditions are not certified.
    pub holds: Option<bool>,
}

fn self_info_moments(p: &[f64], n: f64) -> (f64, f64) {
    let s = |q: f64| -q.log2() / n;
    let mean: f64 = p.iter().filter(|&&q| q > 0.0).map(|&q| q * s(q)).sum();
    let var: f64 = p
        .iter()
        .filter(|&&q| q > 0.0)
        .map(|&q| q * (s(q) - mean).powi(2))
        .sum();
    (mean, var)
}

/// Exact variance of the normalized self-information of `K`, with the
/// alphabet of `k_pmf` taken as `K`.
pub fn variance_bound_check(k_pmf: &Pmf, n: usize, params: &ConverseParams) -> Result<VarianceCheck> {
    if n == 0 {
        return Err(Error::Validation("block length must be positive".into()));
    }
    let (_, var) = self_info_moments(k_pmf.probs(), n as f64);
    let pre = KeyPreconditions::evaluate(
        k_pmf.support_size(),
        entropy_of(k_pmf.probs()),
        (k_pmf.len() as f64).log2(),
        n,
        params,
    );
    let margin = params.mu_beta - var;
    Ok(VarianceCheck {
        lhs: var,
        rhs: params.mu_beta,
        margin,
        preconditions: pre,
        holds: pre.certified().then_some(margin >= 0.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SetBoundReport {
    pub p_in_l: f64,
    /// `1 - 4 mu / gamma^2`.
    pub bound_l: f64,
    pub p_in_d: f64,
    /// `(1 - 4 mu / gamma^2)^2`.
    pub bound_d: f64,
    /// `(1 - 2^{-n gamma / 2}) P[K in L]`, which bounds `P[D]` at every n.
    pub finite_n_bound_d: f64,
    pub h_k: f64,
    pub h_k_given_y: f64,
    pub preconditions: KeyPreconditions,
    pub holds_l: Option<bool>,
    pub holds_d: Option<bool>,
}

/// Builds `L` and `D` from their defining inequalities on the exact law
/// of `(K, Y^n)` and evaluates both probabilities. `log2_k_card` is the
/// size of the key alphabet, which may exceed the support in `joint`.
pub fn set_bound_checks(
    joint: &KYJoint,
    n: usize,
    log2_k_card: f64,
    params: &ConverseParams,
) -> Result<SetBoundReport> {
    if n == 0 {
        return Err(Error::Validation("block length must be positive".into()));
    }
    let nf = n as f64;
    let p_k = joint.k_pmf();
    let p_y = joint.y_pmf();
    let h_k = entropy_of(&p_k);
    let h_ky = entropy_of(&joint.cells.iter().map(|c| c.2).collect::<Vec<_>>());
    let h_k_given_y = (h_ky - entropy_of(&p_y)).max(0.0);
    let gamma = params.gamma_ab;

    let threshold_l = h_k / nf - gamma / 2.0;
    let in_l: Vec<bool> = p_k
        .iter()
        .map(|&q| q > 0.0 && -q.log2() / nf >= threshold_l)
        .collect();
    let p_in_l = p_k
        .iter()
        .zip(&in_l)
        .filter(|(_, &m)| m)
        .map(|(q, _)| q)
        .sum::<f64>()
        .min(1.0);

    let threshold_d = h_k_given_y / nf - gamma;
    let p_in_d: f64 = joint
        .cells
        .iter()
        .filter(|&&(_, y, p)| -(p / p_y[y]).log2() / nf >= threshold_d)
        .map(|c| c.2)
        .sum::<f64>()
        .min(1.0);

    let support = p_k.iter().filter(|&&q| q > 0.0).count();
    let pre = KeyPreconditions::evaluate(support, h_k, log2_k_card, n, params);
    let bound_l = 1.0 - params.chebyshev_term();
    let bound_d = bound_l * bound_l;
    let certified = pre.certified();
    Ok(SetBoundReport {
        p_in_l,
        bound_l,
        p_in_d,
        bound_d,
        finite_n_bound_d: (1.0 - (-nf * gamma / 2.0).exp2()) * p_in_l,
        h_k,
        h_k_given_y,
        preconditions: pre,
        holds_l: certified.then_some(p_in_l >= bound_l),
        holds_d: certified.then_some(p_in_d >= bound_d),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::converselab::derive_params;
    use crate::protocol::KIndex;

    #[test]
    fn uniform_key_has_zero_variance() {
        let n = 10;
        let k = Pmf::uniform(1 << 5).unwrap();
        let p = derive_params(0.01, 0.001, 2.0).unwrap();
        let v = variance_bound_check(&k, n, &p).unwrap();
        assert!(v.lhs.abs() < 1e-20);
        assert_eq!(v.holds, Some(true));
    }

    #[test]
    fn degenerate_key_is_not_applicable() {
        let k = Pmf::new(vec![1.0, 0.0, 0.0]).unwrap();
        let p = derive_params(0.01, 0.001, 2.0).unwrap();
        let v = variance_bound_check(&k, 4, &p).unwrap();
        assert!(!v.preconditions.support);
        assert_eq!(v.holds, None);
    }

    #[test]
    fn uniform_key_independent_of_y() {
        let keys = 8usize;
        let ys = 4usize;
        let joint = KYJoint {
            y_count: ys,
            k_values: (1..=keys as u64).map(|j| KIndex::Word { i: 1, j }).collect(),
            cells: (0..keys)
                .flat_map(|k| (0..ys).map(move |y| (k, y, 1.0 / (keys * ys) as f64)))
                .collect(),
        };
        let p = derive_params(0.01, 0.01, 1.0).unwrap();
        let r = set_bound_checks(&joint, 3, 3.0, &p).unwrap();
        assert!((r.p_in_l - 1.0).abs() < 1e-12);
        assert!((r.p_in_d - 1.0).abs() < 1e-12);
        assert_eq!(r.holds_l, Some(true));
        assert_eq!(r.holds_d, Some(true));
    }
}
