use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::commands::{Invocation, OutputFile};
use crate::error::{CliError, CliResult};
use crate::io::{read_json, to_json_bytes, Format, SCHEMA_VERSION};

pub const MANIFEST_NAME: &str = "manifest.json";

/// Record of one run. Replaying `invocation` under `format` regenerates
/// every file in `outputs` byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool_version: String,
    #[serde(flatten)]
    pub invocation: Invocation,
    pub seed: u64,
    pub format: Format,
    pub outputs: Vec<String>,
    pub duration_seconds: f64,
}

impl RunManifest {
    pub fn new(invocation: Invocation, format: Format, outputs: &[OutputFile], duration: f64) -> Self {
        RunManifest {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: invocation.seed(),
            invocation,
            format,
            outputs: outputs.iter().map(|f| f.name.clone()).collect(),
            duration_seconds: duration,
        }
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let m: RunManifest = read_json(path)?;
        if m.schema_version != SCHEMA_VERSION {
            return Err(CliError::Usage(format!(
                "{}: manifest schema {} is not supported (expected {SCHEMA_VERSION})",
                path.display(),
                m.schema_version
            )));
        }
        Ok(m)
    }
}

pub fn write_outputs(dir: &Path, files: &[OutputFile], manifest: &RunManifest) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    for f in files {
        let path = dir.join(&f.name);
        std::fs::write(&path, &f.bytes).map_err(|e| CliError::io(&path, e))?;
    }
    let path = dir.join(MANIFEST_NAME);
    std::fs::write(&path, to_json_bytes(manifest)).map_err(|e| CliError::io(&path, e))
}

/// Names of the recorded outputs in `dir` whose bytes differ from `files`.
pub fn mismatches(dir: &Path, manifest: &RunManifest, files: &[OutputFile]) -> CliResult<Vec<String>> {
    let mut bad = Vec::new();
    for name in &manifest.outputs {
        let path = dir.join(name);
        let recorded = std::fs::read(&path).map_err(|e| CliError::io(&path, e))?;
        match files.iter().find(|f| &f.name == name) {
            Some(f) if f.bytes == recorded => {}
            _ => bad.push(name.clone()),
        }
    }
    for f in files {
        if !manifest.outputs.contains(&f.name) {
            bad.push(f.name.clone());
        }
    }
    Ok(bad)
}
