//! Engine configuration from a TOML file plus `--set key=value` overrides.

use std::fs;
use std::path::Path;

use toml::{Table, Value};
use xpeerd_core::EngineConfig;

use crate::CliError;

/// Parses the right-hand side of an override as a TOML value, falling back
/// to a bare string (`scope.domain=SOC`).
fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

fn apply_override(root: &mut Table, assignment: &str) -> Result<(), CliError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("--set expects key=value, got `{assignment}`")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(CliError::Usage(format!("--set has an empty key segment: `{key}`")));
    }
    let (last, parents) = path.split_last().expect("split yields at least one segment");
    let mut table = root;
    for p in parents {
        let entry = table
            .entry(p.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Usage(format!("--set: `{p}` is not a section")))?;
    }
    table.insert(last.to_string(), parse_value(raw.trim()));
    Ok(())
}

pub fn load(config: Option<&Path>, overrides: &[String]) -> Result<EngineConfig, CliError> {
    let mut table = match config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            text.parse::<Table>()
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => Table::new(),
    };
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let cfg: EngineConfig = table.try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(cfg)
}

pub fn show(cfg: &EngineConfig) -> String {
    toml::to_string_pretty(cfg).expect("config serializes to TOML")
}
