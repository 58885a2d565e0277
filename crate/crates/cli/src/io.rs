use std::path::Path;

use clap::ValueEnum;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_json(path, &text)
}

pub fn parse_json<T: DeserializeOwned>(path: &Path, text: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn to_json_bytes<T: Serialize>(v: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("serializable value");
    out.push(b'\n');
    out
}

/// Flattens a JSON value into `key,value` rows with dotted paths.
pub fn to_key_value_csv(v: &Value) -> CliResult<Vec<u8>> {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Invariant(format!("writing summary CSV: {e}"));
    w.write_record(["key", "value"]).map_err(err)?;
    for (k, v) in rows {
        w.write_record([k, v]).map_err(err)?;
    }
    w.into_inner()
        .map_err(|e| CliError::Invariant(format!("writing summary CSV: {e}")))
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(&key(k), v, out)),
        Value::Array(a) => a
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(&key(&i.to_string()), v, out)),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}
