//! Resolved configurations and their execution. A resolved configuration
//! holds every input by value, so a manifest replays without the original
//! files.

mod capacity;
mod lemmas;
mod simulate;
mod spectrum;
mod ucr;

use serde::{Deserialize, Serialize};

pub use capacity::CapacityConfig;
pub use lemmas::LemmasConfig;
pub use simulate::{ConditionSettings, SimulateConfig};
pub use spectrum::SpectrumConfig;
pub use ucr::UcrConfig;

use crate::error::CliResult;
use crate::io::{to_json_bytes, to_key_value_csv, Format, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "config", rename_all = "lowercase")]
pub enum Invocation {
    Capacity(CapacityConfig),
    Ucr(UcrConfig),
    Simulate(SimulateConfig),
    Spectrum(SpectrumConfig),
    Lemmas(LemmasConfig),
}

impl Invocation {
    pub fn name(&self) -> &'static str {
        match self {
            Invocation::Capacity(_) => "capacity",
            Invocation::Ucr(_) => "ucr",
            Invocation::Simulate(_) => "simulate",
            Invocation::Spectrum(_) => "spectrum",
            Invocation::Lemmas(_) => "lemmas",
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Invocation::Capacity(_) => 0,
            Invocation::Ucr(c) => c.solver.seed,
            Invocation::Simulate(c) => c.descriptor.seed.unwrap_or(0),
            Invocation::Spectrum(c) => c.seed,
            Invocation::Lemmas(c) => c.seed,
        }
    }

    pub fn execute(&self, format: Format) -> CliResult<Outcome> {
        let result = match self {
            Invocation::Capacity(c) => c.run()?,
            Invocation::Ucr(c) => c.run()?,
            Invocation::Simulate(c) => c.run()?,
            Invocation::Spectrum(c) => c.run()?,
            Invocation::Lemmas(c) => c.run()?,
        };
        Outcome::assemble(self.name(), result, format)
    }
}

/// What a command computed, before rendering.
pub struct CommandResult {
    pub summary: serde_json::Value,
    pub tables: Vec<OutputFile>,
    pub invariant_failure: Option<String>,
}

impl CommandResult {
    fn new<T: Serialize>(summary: &T) -> Self {
        CommandResult {
            summary: serde_json::to_value(summary).expect("serializable summary"),
            tables: Vec::new(),
            invariant_failure: None,
        }
    }

    fn with_table(mut self, name: &str, bytes: Vec<u8>) -> Self {
        self.tables.push(OutputFile {
            name: name.to_string(),
            bytes,
        });
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputFile {
    pub name: String,
    pub bytes: Vec<u8>,
}

/// Rendered outputs: the summary file first, then any tables.
pub struct Outcome {
    pub files: Vec<OutputFile>,
    pub invariant_failure: Option<String>,
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema_version: u32,
    command: &'a str,
    result: &'a serde_json::Value,
}

impl Outcome {
    fn assemble(command: &str, r: CommandResult, format: Format) -> CliResult<Self> {
        let env = Envelope {
            schema_version: SCHEMA_VERSION,
            command,
            result: &r.summary,
        };
        let summary = match format {
            Format::Json => OutputFile {
                name: format!("{command}.json"),
                bytes: to_json_bytes(&env),
            },
            Format::Csv => OutputFile {
                name: format!("{command}_summary.csv"),
                bytes: to_key_value_csv(&serde_json::to_value(&env).expect("serializable"))?,
            },
        };
        let mut files = vec![summary];
        files.extend(r.tables);
        Ok(Outcome {
            files,
            invariant_failure: r.invariant_failure,
        })
    }
}
