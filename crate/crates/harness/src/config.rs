//! Scenario config files. The format follows the extension: `.toml` is TOML,
//! anything else is JSON. Field names are exactly those of
//! [`ScenarioConfig`]; missing fields take defaults, unknown fields are
//! rejected.

use std::fs;
use std::path::Path;

use risv2x_core::scenario::ScenarioConfig;

use crate::error::{HarnessError, Result};

pub fn parse_config(text: &str, toml_format: bool, path: &Path) -> Result<ScenarioConfig> {
    let parsed = if toml_format {
        toml::from_str(text).map_err(|e| e.to_string())
    } else {
        serde_json::from_str(text).map_err(|e| e.to_string())
    };
    let config: ScenarioConfig = parsed.map_err(|message| HarnessError::Parse {
        path: path.to_path_buf(),
        message,
    })?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let is_toml = path.extension().is_some_and(|ext| ext.eq_ignore_ascii_case("toml"));
    parse_config(&text, is_toml, path)
}

pub fn save_config(config: &ScenarioConfig, path: &Path) -> Result<()> {
    let is_toml = path.extension().is_some_and(|ext| ext.eq_ignore_ascii_case("toml"));
    let text = if is_toml {
        toml::to_string_pretty(config).map_err(|e| HarnessError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?
    } else {
        serde_json::to_string_pretty(config)?
    };
    fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}
