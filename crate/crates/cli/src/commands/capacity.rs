use serde::{Deserialize, Serialize};
use ucr_core::channelcap::{dmc_capacity, ChannelSpec};

use super::CommandResult;
use crate::error::CliResult;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacityConfig {
    pub channel: ChannelSpec,
    pub tol: f64,
}

impl CapacityConfig {
    pub fn run(&self) -> CliResult<CommandResult> {
        let w = self.channel.as_dmc()?;
        let cap = dmc_capacity(&w, self.tol)?;
        Ok(CommandResult::new(&cap))
    }
}
