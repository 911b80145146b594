//! Run configuration: model parameters, scenario presets and output options.
//!
//! Files are TOML; the HTTP API takes the same document as JSON. A user
//! document only needs the fields it changes. It is merged key by key onto
//! the embedded defaults, and `scenarios` entries are matched by `name` so a
//! preset can be tweaked without restating it.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::scenario::{Model, Scenario};
use crate::ValidationError;

const DEFAULTS_TOML: &str = include_str!("defaults.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputOptions {
    pub format: OutputFormat,
    pub verbose: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub model: Model,
    /// Scenario that deltas are computed against.
    pub baseline: String,
    #[serde(default)]
    pub output: OutputOptions,
    pub scenarios: Vec<Scenario>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("{path}: {message}")]
    Field { path: String, message: String },
    #[error("invalid parameter {0}")]
    Validation(#[from] ValidationError),
    #[error("unknown scenario `{name}`; available: {}", available.join(", "))]
    UnknownScenario { name: String, available: Vec<String> },
}

impl ConfigError {
    /// Dotted path of the offending field, when there is one.
    pub fn field(&self) -> Option<&str> {
        match self {
            ConfigError::Field { path, .. } => Some(path),
            ConfigError::Validation(v) => Some(&v.field),
            _ => None,
        }
    }
}

/// Recursively merge `overlay` into `base`. Objects merge key by key, arrays
/// of named objects merge by `name`, anything else is replaced.
pub fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (Value::Array(b), Value::Array(o)) if is_named(b) && is_named(&o) => {
            for item in o {
                let name = item["name"].clone();
                match b.iter_mut().find(|x| x["name"] == name) {
                    Some(slot) => merge(slot, item),
                    None => b.push(item),
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn is_named(items: &[Value]) -> bool {
    items.iter().all(|x| x.get("name").is_some_and(Value::is_string))
}

fn from_value<T: serde::de::DeserializeOwned>(value: Value) -> Result<T, ConfigError> {
    serde_path_to_error::deserialize(value).map_err(|e| ConfigError::Field {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

impl RunConfig {
    /// The embedded presets on top of the built-in model parameters.
    pub fn defaults() -> RunConfig {
        let value: toml::Value = toml::from_str(DEFAULTS_TOML).expect("embedded defaults parse");
        let doc = serde_json::to_value(value).expect("toml maps to json");
        let config: RunConfig = from_value(doc).expect("embedded defaults deserialize");
        config.validate().expect("embedded defaults are valid");
        config
    }

    /// Merge a partial document onto this configuration and validate the result.
    pub fn with_overrides(&self, overrides: Value) -> Result<RunConfig, ConfigError> {
        if !overrides.is_object() {
            return Err(ConfigError::Field {
                path: ".".into(),
                message: "the configuration must be a table / object".into(),
            });
        }
        let mut doc = serde_json::to_value(self).expect("config serializes");
        merge(&mut doc, overrides);
        let config: RunConfig = from_value(doc)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_toml_str(text: &str) -> Result<RunConfig, ConfigError> {
        let value: toml::Value = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        let doc = serde_json::to_value(value).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        Self::defaults().with_overrides(doc)
    }

    pub fn from_json_str(text: &str) -> Result<RunConfig, ConfigError> {
        let doc: Value = serde_json::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        Self::defaults().with_overrides(doc)
    }

    /// Load a TOML file, or a JSON file when the extension says so.
    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        }
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        self.model.validate()?;
        if self.scenarios.is_empty() {
            return Err(ValidationError::new("scenarios", "at least one scenario is required"));
        }
        for (i, s) in self.scenarios.iter().enumerate() {
            if self.scenarios[..i].iter().any(|o| o.name == s.name) {
                return Err(ValidationError::new("scenarios", format!("duplicate scenario name `{}`", s.name)));
            }
            s.validate().map_err(|e| e.within("scenarios"))?;
        }
        if self.scenario(&self.baseline).is_err() {
            return Err(ValidationError::new(
                "baseline",
                format!("`{}` is not one of the scenarios", self.baseline),
            ));
        }
        Ok(())
    }

    pub fn scenario_names(&self) -> Vec<String> {
        self.scenarios.iter().map(|s| s.name.clone()).collect()
    }

    pub fn scenario(&self, name: &str) -> Result<&Scenario, ConfigError> {
        self.scenarios
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| ConfigError::UnknownScenario {
                name: name.into(),
                available: self.scenario_names(),
            })
    }

    pub fn baseline_scenario(&self) -> &Scenario {
        self.scenario(&self.baseline).expect("validated baseline")
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to toml")
    }
}

/// Resolve a scenario given either by preset name or as a (partial) scenario
/// document. A document whose `name` matches a preset is merged onto it.
pub fn resolve_scenario(config: &RunConfig, selector: Value) -> Result<Scenario, ConfigError> {
    match selector {
        Value::String(name) => config.scenario(&name).cloned(),
        Value::Object(doc) => {
            let preset = doc
                .get("name")
                .and_then(Value::as_str)
                .and_then(|n| config.scenario(n).ok())
                .cloned()
                .unwrap_or_default();
            let mut base = serde_json::to_value(preset).expect("scenario serializes");
            merge(&mut base, Value::Object(doc));
            let scenario: Scenario = from_value(base)?;
            scenario.validate()?;
            Ok(scenario)
        }
        _ => Err(ConfigError::Field {
            path: "scenario".into(),
            message: "expected a preset name or a scenario object".into(),
        }),
    }
}
