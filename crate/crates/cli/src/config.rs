//! Config files mirroring the command-line flags.
//!
//! A config file is a TOML (or, with a `.json` extension, JSON) table whose
//! keys are the flag names with `-` replaced by `_`. Flags given on the
//! command line take precedence over the file.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::CliError;

fn load(path: &Path) -> Result<serde_json::Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    let value: serde_json::Value = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?
    } else {
        let table: toml::Table =
            toml::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        serde_json::to_value(table)?
    };
    if !value.is_object() {
        return Err(CliError::usage(format!(
            "{} must hold a table of settings",
            path.display()
        )));
    }
    Ok(value)
}

fn is_unset(v: &serde_json::Value) -> bool {
    v.is_null() || v.as_array().is_some_and(Vec::is_empty)
}

/// Overlays the flags in `cli` on the file at `path` (if any). Keys that
/// name no flag are rejected.
pub fn resolve<T: Serialize + DeserializeOwned>(cli: T, path: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(cli);
    };
    let mut merged = load(path)?;
    let flags = serde_json::to_value(&cli)?;
    let (Some(base), Some(flags)) = (merged.as_object_mut(), flags.as_object()) else {
        return Err(CliError::usage("arguments must serialize to a table"));
    };
    if let Some(k) = base.keys().find(|k| !flags.contains_key(*k)) {
        return Err(CliError::usage(format!("{}: unknown setting `{k}`", path.display())));
    }
    for (k, v) in flags {
        if !is_unset(v) {
            base.insert(k.clone(), v.clone());
        }
    }
    serde_json::from_value(merged).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}
