//! The objective `I(U;X)` and constraint `I(U;X) - I(U;Y)` of the UCR
//! capacity program, for a fixed source and an auxiliary channel `P_{U|X}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::probspace::info::{entropy_of, plogp};
use crate::probspace::{compose_aux, ConditionalPmf, ConditionalPmfDoc, JointPmf, AXIS_U, AXIS_X, AXIS_Y};

/// Auxiliary variable `U`, given as a channel from the `X` alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryChannel {
    cond: ConditionalPmf,
}

impl AuxiliaryChannel {
    pub fn new(cond: ConditionalPmf) -> Self {
        AuxiliaryChannel { cond }
    }

    /// `U = X`.
    pub fn identity(x_card: usize) -> Self {
        AuxiliaryChannel::new(ConditionalPmf::identity(x_card))
    }

    pub fn cond(&self) -> &ConditionalPmf {
        &self.cond
    }

    pub fn u_card(&self) -> usize {
        self.cond.n_out()
    }

    pub fn x_card(&self) -> usize {
        self.cond.n_in()
    }

    /// Whether `|U| <= |X| + 1`, the working cardinality cap of the solvers.
    pub fn within_cardinality_cap(&self) -> bool {
        self.u_card() <= self.x_card() + 1
    }

    pub fn to_doc(&self) -> ConditionalPmfDoc {
        ConditionalPmfDoc::from_conditional(&self.cond)
    }
}

impl Serialize for AuxiliaryChannel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_doc().serialize(s)
    }
}

impl<'de> Deserialize<'de> for AuxiliaryChannel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = ConditionalPmfDoc::deserialize(d)?;
        doc.to_conditional()
            .map(AuxiliaryChannel::new)
            .map_err(serde::de::Error::custom)
    }
}

/// `(I(U;X), I(U;X) - I(U;Y))` in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UcrPoint {
    pub rate: f64,
    pub gap: f64,
}

/// Evaluates the objective and constraint from the composed `(U, X, Y)` law.
pub fn ucr_objective(source: &JointPmf, aux: &AuxiliaryChannel) -> Result<UcrPoint> {
    let triple = compose_aux(source, aux.cond())?;
    let iux = triple.mutual_information(&[AXIS_U], &[AXIS_X])?.max(0.0);
    let iuy = triple.mutual_information(&[AXIS_U], &[AXIS_Y])?.max(0.0);
    Ok(UcrPoint {
        rate: iux,
        gap: (iux - iuy).max(0.0),
    })
}

/// Allocation-light evaluator for search loops.
///
/// Uses `I(U;X) = H(U) + H(X) - H(U,X)` and
/// `I(U;X) - I(U;Y) = H(U,Y) - H(Y) - H(U,X) + H(X)`.
#[derive(Debug, Clone)]
pub(crate) struct Evaluator {
    nx: usize,
    ny: usize,
    px: Vec<f64>,
    pxy: Vec<f64>,
    hx: f64,
    hy: f64,
}

impl Evaluator {
    pub(crate) fn new(source: &JointPmf) -> Self {
        let px = source.marginal_x().probs().to_vec();
        let hx = entropy_of(&px);
        let hy = entropy_of(source.marginal_y().probs());
        Evaluator {
            nx: source.nx(),
            ny: source.ny(),
            px,
            pxy: source.probs().to_vec(),
            hx,
            hy,
        }
    }

    /// `rows` is row-major `W(u|x)` with `u_card` columns.
    pub(crate) fn eval(&self, rows: &[f64], u_card: usize) -> UcrPoint {
        let mut hu_terms = 0.0;
        let mut hux = 0.0;
        let mut huy = 0.0;
        for u in 0..u_card {
            let mut pu = 0.0;
            for x in 0..self.nx {
                let p = rows[x * u_card + u] * self.px[x];
                pu += p;
                hux += plogp(p);
            }
            hu_terms += plogp(pu);
            for y in 0..self.ny {
                let mut p = 0.0;
                for x in 0..self.nx {
                    p += rows[x * u_card + u] * self.pxy[x * self.ny + y];
                }
                huy += plogp(p);
            }
        }
        let rate = (hu_terms + self.hx - hux).max(0.0);
        let gap = (huy - self.hy - hux + self.hx).max(0.0);
        UcrPoint { rate, gap }
    }

    pub(crate) fn nx(&self) -> usize {
        self.nx
    }

    pub(crate) fn px(&self) -> &[f64] {
        &self.px
    }

    pub(crate) fn hx(&self) -> f64 {
        self.hx
    }
}

pub(crate) fn check_u_card(u_card: usize) -> Result<()> {
    if u_card == 0 || u_card > 255 {
        return Err(Error::Validation(format!(
            "auxiliary alphabet size must lie in 1..=255, got {u_card}"
        )));
    }
    Ok(())
}
