//! UCR capacity: maximize `I(U;X)` over auxiliary channels `P_{U|X}`
//! subject to `I(U;X) - I(U;Y) <= C`, where `C` is the capacity of the
//! channel between the terminals.
//!
//! Two independent routes are provided: [`ucr_capacity_oracle`] enumerates
//! a simplex grid, and [`ucr_capacity_solve`] combines the envelope of
//! deterministic maps with a random-restart local search. Time-sharing
//! between two achievers is admissible (a selector coordinate can be folded
//! into `U`), so both report the upper concave envelope of what they find.

mod curve;
mod envelope;
mod objective;
mod oracle;
mod solver;

use serde::Serialize;

pub use curve::{ucr_curve, write_curve_csv, CurvePoint};
pub use objective::{ucr_objective, AuxiliaryChannel, UcrPoint};
pub use oracle::{
    ucr_capacity_oracle, ucr_capacity_oracle_with, OracleOptions, OracleReport, DEFAULT_DIRICHLET_COUNT,
    ORACLE_GRID_GUARD,
};
pub use solver::{ucr_capacity_solve, ucr_capacity_solve_with, SolveOptions};

use crate::probspace::ConditionalPmf;
use envelope::EnvelopeValue;

/// Constraint violations up to this size are treated as feasible.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Brute-force grid enumeration.
    Oracle,
    /// Deterministic-map envelope refined by local search.
    Envelope,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Oracle => "oracle",
            Method::Envelope => "envelope",
        }
    }
}

/// An optimal or near-optimal auxiliary variable.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Achiever {
    Pure {
        aux: AuxiliaryChannel,
    },
    /// Use `first` with probability `weight` and `second` otherwise.
    TimeShared {
        weight: f64,
        first: AuxiliaryChannel,
        second: AuxiliaryChannel,
    },
}

impl Achiever {
    /// A single auxiliary channel realizing this achiever. For time-sharing
    /// the output alphabet is the disjoint union of both alphabets, with
    /// the selector folded into `U`.
    pub fn materialize(&self) -> AuxiliaryChannel {
        match self {
            Achiever::Pure { aux } => aux.clone(),
            Achiever::TimeShared {
                weight,
                first,
                second,
            } => {
                let (a, b) = (first.cond(), second.cond());
                let n_out = a.n_out() + b.n_out();
                let mut probs = Vec::with_capacity(a.n_in() * n_out);
                for x in 0..a.n_in() {
                    probs.extend(a.row(x).iter().map(|p| weight * p));
                    probs.extend(b.row(x).iter().map(|p| (1.0 - weight) * p));
                }
                AuxiliaryChannel::new(ConditionalPmf::from_rows_normalized(
                    a.n_in(),
                    n_out,
                    probs,
                ))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct UcrSolution {
    /// `I(U;X)` of the achiever, in bits per symbol.
    pub value: f64,
    pub achiever: Achiever,
    /// `I(U;X) - I(U;Y)` of the achiever.
    pub constraint: f64,
    /// `C` minus the constraint value.
    pub constraint_slack: f64,
    pub method: Method,
}

impl UcrSolution {
    pub(crate) fn pure(aux: AuxiliaryChannel, point: UcrPoint, c: f64, method: Method) -> Self {
        UcrSolution {
            value: point.rate,
            achiever: Achiever::Pure { aux },
            constraint: point.gap,
            constraint_slack: c - point.gap,
            method,
        }
    }

    pub(crate) fn from_envelope<I: Copy>(
        value: EnvelopeValue<I>,
        c: f64,
        method: Method,
        rebuild: impl Fn(I) -> AuxiliaryChannel,
    ) -> Self {
        let achiever = match value {
            EnvelopeValue::Pure(p) => Achiever::Pure { aux: rebuild(p.id) },
            EnvelopeValue::Mixed { left, right, weight } => Achiever::TimeShared {
                weight,
                first: rebuild(left.id),
                second: rebuild(right.id),
            },
        };
        let constraint = value.gap();
        UcrSolution {
            value: value.rate(),
            achiever,
            constraint,
            constraint_slack: c - constraint,
            method,
        }
    }
}
