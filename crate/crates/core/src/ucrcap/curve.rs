//! Capacity as a function of the channel capacity `C`.

use std::io::Write;

use serde::Serialize;

use super::solver::{ucr_capacity_solve_with, SolveOptions};
use super::{Achiever, Method, UcrSolution};
use crate::error::{Error, Result};
use crate::probspace::JointPmf;

#[derive(Debug, Clone, Serialize)]
pub struct CurvePoint {
    pub c: f64,
    pub value: f64,
    pub method: Method,
    pub achiever: Achiever,
}

/// Solves at every point of an ascending grid. An achiever feasible at a
/// smaller `C` stays feasible at larger ones, so each point keeps the best
/// solution seen so far and the curve is nondecreasing by construction.
pub fn ucr_curve(
    source: &JointPmf,
    c_grid: &[f64],
    u_card: usize,
    opts: &SolveOptions,
) -> Result<Vec<CurvePoint>> {
    if c_grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Validation("C grid must be sorted ascending".into()));
    }
    let mut best: Option<UcrSolution> = None;
    let mut out = Vec::with_capacity(c_grid.len());
    for &c in c_grid {
        let s = ucr_capacity_solve_with(source, c, u_card, opts)?;
        let keep = match &best {
            Some(b) if b.value > s.value => b.clone(),
            _ => s,
        };
        out.push(CurvePoint {
            c,
            value: keep.value,
            method: keep.method,
            achiever: keep.achiever.clone(),
        });
        best = Some(keep);
    }
    Ok(out)
}

/// CSV with columns `C_bits,value_bits,method,achiever_json`.
pub fn write_curve_csv<W: Write>(points: &[CurvePoint], w: W) -> Result<()> {
    let io = |e: csv::Error| Error::Config(format!("writing curve CSV: {e}"));
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["C_bits", "value_bits", "method", "achiever_json"])
        .map_err(io)?;
    for p in points {
        let json = serde_json::to_string(&p.achiever)
            .map_err(|e| Error::Config(format!("serializing achiever: {e}")))?;
        wr.write_record([
            format!("{:?}", p.c),
            format!("{:?}", p.value),
            p.method.as_str().to_string(),
            json,
        ])
        .map_err(io)?;
    }
    wr.flush()
        .map_err(|e| Error::Config(format!("writing curve CSV: {e}")))?;
    Ok(())
}
