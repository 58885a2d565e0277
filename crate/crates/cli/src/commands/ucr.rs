use serde::{Deserialize, Serialize};
use ucr_core::channelcap::{dmc_capacity, ChannelSpec, DmcCapacity};
use ucr_core::probspace::{JointPmf, JointPmfDoc};
use ucr_core::ucrcap::{
    ucr_capacity_oracle_with, ucr_capacity_solve_with, ucr_curve, write_curve_csv, CurvePoint,
    OracleOptions, SolveOptions, UcrSolution,
};

use super::CommandResult;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UcrConfig {
    pub source: JointPmfDoc,
    /// Constraint level in bits; exclusive with `channel`.
    pub c: Option<f64>,
    /// Channel whose capacity sets the constraint level.
    pub channel: Option<ChannelSpec>,
    pub tol: f64,
    pub u_card: usize,
    pub oracle: bool,
    pub grid_step: f64,
    pub dirichlet_count: usize,
    pub grid: Option<Vec<f64>>,
    pub solver: SolveOptions,
}

#[derive(Serialize)]
struct Summary {
    c: Option<f64>,
    channel_capacity: Option<DmcCapacity>,
    u_card: usize,
    solution: Option<UcrSolution>,
    oracle: Option<OracleStats>,
    curve_points: Option<usize>,
}

#[derive(Serialize)]
struct OracleStats {
    grid_points: u64,
    deterministic_maps: u64,
    dirichlet_samples: u64,
    hull_size: usize,
}

impl UcrConfig {
    fn oracle_options(&self) -> OracleOptions {
        OracleOptions {
            u_card: self.u_card,
            grid_step: self.grid_step,
            dirichlet_count: self.dirichlet_count,
            seed: self.solver.seed,
        }
    }

    fn level(&self) -> CliResult<(Option<f64>, Option<DmcCapacity>)> {
        match (&self.c, &self.channel) {
            (Some(_), Some(_)) => Err(CliError::Usage("give either --C or --channel, not both".into())),
            (Some(c), None) => Ok((Some(*c), None)),
            (None, Some(ch)) => {
                let cap = dmc_capacity(&ch.as_dmc()?, self.tol)?;
                Ok((Some(cap.capacity), Some(cap)))
            }
            (None, None) if self.grid.is_some() => Ok((None, None)),
            (None, None) => Err(CliError::Usage("one of --C, --channel or --grid is required".into())),
        }
    }

    fn curve(&self, source: &JointPmf, grid: &[f64]) -> CliResult<Vec<CurvePoint>> {
        if !self.oracle {
            return Ok(ucr_curve(source, grid, self.u_card, &self.solver)?);
        }
        if grid.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(ucr_core::Error::Validation("C grid must be sorted ascending".into()).into());
        }
        let opts = self.oracle_options();
        let mut out: Vec<CurvePoint> = Vec::with_capacity(grid.len());
        for &c in grid {
            let s = ucr_capacity_oracle_with(source, c, &opts)?.solution;
            let point = match out.last() {
                Some(prev) if prev.value > s.value => CurvePoint { c, ..prev.clone() },
                _ => CurvePoint {
                    c,
                    value: s.value,
                    method: s.method,
                    achiever: s.achiever,
                },
            };
            out.push(point);
        }
        Ok(out)
    }

    pub fn run(&self) -> CliResult<CommandResult> {
        let source = self.source.to_joint()?;
        let (c, channel_capacity) = self.level()?;
        let mut oracle = None;
        let solution = match c {
            Some(c) if self.oracle => {
                let r = ucr_capacity_oracle_with(&source, c, &self.oracle_options())?;
                oracle = Some(OracleStats {
                    grid_points: r.grid_points,
                    deterministic_maps: r.deterministic_maps,
                    dirichlet_samples: r.dirichlet_samples,
                    hull_size: r.hull_size,
                });
                Some(r.solution)
            }
            Some(c) => Some(ucr_capacity_solve_with(&source, c, self.u_card, &self.solver)?),
            None => None,
        };
        let mut table = None;
        if let Some(grid) = &self.grid {
            let points = self.curve(&source, grid)?;
            let mut bytes = Vec::new();
            write_curve_csv(&points, &mut bytes)?;
            table = Some((points.len(), bytes));
        }
        let summary = Summary {
            c,
            channel_capacity,
            u_card: self.u_card,
            solution,
            oracle,
            curve_points: table.as_ref().map(|t| t.0),
        };
        let mut r = CommandResult::new(&summary);
        if let Some((_, bytes)) = table {
            r = r.with_table("curve.csv", bytes);
        }
        Ok(r)
    }
}
