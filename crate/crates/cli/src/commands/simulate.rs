use serde::{Deserialize, Serialize};
use ucr_core::protocol::{
    check_achievability_conditions, exact_analyze, run_monte_carlo, write_trials_csv,
    AchievabilityParams, AchievabilityReport, ConditionInputs, ExactReport, MonteCarloReport,
    RunDescriptor,
};
use ucr_core::Error;

use super::CommandResult;
use crate::error::CliResult;

/// Largest block length routed to the exact analyzer.
pub const EXACT_MAX_N: usize = 10;

/// Constants of the four achievability conditions. `c` defaults to
/// `I(U;X) + mu + 1` and the target rate to `I(U;X)` of the run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionSettings {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub c: Option<f64>,
    pub h_target: Option<f64>,
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub descriptor: RunDescriptor,
    pub exact: bool,
    pub conditions: ConditionSettings,
}

#[derive(Serialize)]
#[serde(tag = "analysis", rename_all = "snake_case")]
enum Report {
    Exact(ExactReport),
    MonteCarlo(MonteCarloReport),
}

#[derive(Serialize)]
struct Summary {
    report: Report,
    condition_params: AchievabilityParams,
    conditions: AchievabilityReport,
}

impl SimulateConfig {
    fn params(&self, i_ux: f64) -> CliResult<AchievabilityParams> {
        let s = &self.conditions;
        let c = s.c.unwrap_or(i_ux + self.descriptor.mu + 1.0);
        let mut p = AchievabilityParams::new(s.alpha, c, s.beta, s.delta, s.h_target.unwrap_or(i_ux))?;
        if let Some(e) = s.epsilon {
            p = p.with_epsilon(e);
            p.validate()?;
        }
        Ok(p)
    }

    pub fn run(&self) -> CliResult<CommandResult> {
        let cfg = self.descriptor.to_config(None)?;
        if self.exact {
            if cfg.n > EXACT_MAX_N {
                return Err(Error::Config(format!(
                    "--exact supports n <= {EXACT_MAX_N}, got n = {}; drop --exact to run Monte Carlo",
                    cfg.n
                ))
                .into());
            }
            let rep = exact_analyze(&cfg)?;
            let params = self.params(rep.i_ux)?;
            let conditions = check_achievability_conditions(&ConditionInputs::from(&rep), &params);
            return Ok(CommandResult::new(&Summary {
                report: Report::Exact(rep),
                condition_params: params,
                conditions,
            }));
        }
        let run = run_monte_carlo(&cfg, self.descriptor.trials as u64)?;
        let params = self.params(run.report.i_ux)?;
        let conditions =
            check_achievability_conditions(&run.report.condition_inputs(cfg.theta), &params);
        let mut trials = Vec::new();
        write_trials_csv(&run.outcomes, &mut trials)?;
        Ok(CommandResult::new(&Summary {
            report: Report::MonteCarlo(run.report),
            condition_params: params,
            conditions,
        })
        .with_table("trials.csv", trials))
    }
}
