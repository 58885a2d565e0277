//! JSON documents for distributions: explicit alphabet labels plus
//! row-major probability arrays.

use serde::{Deserialize, Serialize};

use super::pmf::{ConditionalPmf, JointPmf, Pmf};
use crate::error::{Error, Result};

fn check_labels(labels: &[String], expected: usize, what: &str) -> Result<()> {
    if labels.len() != expected {
        return Err(Error::Dimension(format!(
            "{what} has {} labels but {expected} symbols",
            labels.len()
        )));
    }
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::Validation(format!("{what}: duplicate label {l:?}")));
        }
    }
    Ok(())
}

/// Labels `"0", "1", ...`.
pub fn index_labels(size: usize) -> Vec<String> {
    (0..size).map(|i| i.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PmfDoc {
    pub alphabet: Vec<String>,
    pub probs: Vec<f64>,
}

impl PmfDoc {
    pub fn from_pmf(p: &Pmf, alphabet: Option<Vec<String>>) -> Self {
        PmfDoc {
            alphabet: alphabet.unwrap_or_else(|| index_labels(p.len())),
            probs: p.probs().to_vec(),
        }
    }

    pub fn to_pmf(&self) -> Result<Pmf> {
        check_labels(&self.alphabet, self.probs.len(), "pmf alphabet")?;
        Pmf::new(self.probs.clone())
    }
}

/// Source description: joint law of `(X, Y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointPmfDoc {
    pub alphabet_x: Vec<String>,
    pub alphabet_y: Vec<String>,
    pub probs: Vec<f64>,
}

impl JointPmfDoc {
    pub fn from_joint(j: &JointPmf) -> Self {
        JointPmfDoc {
            alphabet_x: index_labels(j.nx()),
            alphabet_y: index_labels(j.ny()),
            probs: j.probs().to_vec(),
        }
    }

    pub fn to_joint(&self) -> Result<JointPmf> {
        let (nx, ny) = (self.alphabet_x.len(), self.alphabet_y.len());
        check_labels(&self.alphabet_x, nx, "alphabet_x")?;
        check_labels(&self.alphabet_y, ny, "alphabet_y")?;
        JointPmf::new(nx, ny, self.probs.clone())
    }
}

/// Stochastic matrix, one row of `alphabet_out` probabilities per input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionalPmfDoc {
    pub alphabet_in: Vec<String>,
    pub alphabet_out: Vec<String>,
    pub probs: Vec<f64>,
}

impl ConditionalPmfDoc {
    pub fn from_conditional(w: &ConditionalPmf) -> Self {
        ConditionalPmfDoc {
            alphabet_in: index_labels(w.n_in()),
            alphabet_out: index_labels(w.n_out()),
            probs: w.probs().to_vec(),
        }
    }

    pub fn to_conditional(&self) -> Result<ConditionalPmf> {
        let (ni, no) = (self.alphabet_in.len(), self.alphabet_out.len());
        check_labels(&self.alphabet_in, ni, "alphabet_in")?;
        check_labels(&self.alphabet_out, no, "alphabet_out")?;
        ConditionalPmf::new(ni, no, self.probs.clone())
    }
}
