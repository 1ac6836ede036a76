use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use thiserror::Error;

use crate::geometry::EpsilonSpec;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid config key `{key}`: {message}")]
    Validation { key: String, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonMode {
    Geometric,
    Thm1b,
    File,
}

/// Settings shared by all subcommands. Missing keys take the defaults
/// `B = 20`, `grid_n = 256`, `seed = 0`, `depth = 3`, geometric `ε`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_mode")]
    pub epsilon_mode: EpsilonMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_path: Option<PathBuf>,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(rename = "B", default = "default_b")]
    pub b: f64,
    #[serde(default = "default_grid")]
    pub grid_n: usize,
    #[serde(default)]
    pub seed: u64,
    /// Subcommand-specific parameters, passed through untouched.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, Value>,
}

const KEYS: [&str; 7] = ["epsilon_mode", "epsilon_path", "depth", "B", "grid_n", "seed", "params"];

fn default_mode() -> EpsilonMode {
    EpsilonMode::Geometric
}
fn default_depth() -> usize {
    3
}
fn default_b() -> f64 {
    20.0
}
fn default_grid() -> usize {
    256
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            epsilon_mode: default_mode(),
            epsilon_path: None,
            depth: default_depth(),
            b: default_b(),
            grid_n: default_grid(),
            seed: 0,
            params: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let Value::Object(map) = value else {
            return Err(ConfigError::Validation { key: "<root>".into(), message: "expected a JSON object".into() });
        };
        check_keys(&map)?;
        let cfg: RunConfig = serde_json::from_value(Value::Object(map.clone())).map_err(|e| {
            let key = KEYS.iter().find(|k| e.to_string().contains(&format!("`{k}`"))).copied();
            let key = key.or_else(|| first_bad_key(&map)).unwrap_or("<root>");
            ConfigError::Validation { key: key.to_string(), message: e.to_string() }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, message: String| Err(ConfigError::Validation { key: key.into(), message });
        if self.depth == 0 {
            return bad("depth", "depth must be at least 1".into());
        }
        if !(self.b > 0.0 && self.b.is_finite()) {
            return bad("B", format!("B must be positive, got {}", self.b));
        }
        if self.grid_n < 2 {
            return bad("grid_n", format!("grid_n must be at least 2, got {}", self.grid_n));
        }
        if self.epsilon_mode == EpsilonMode::File && self.epsilon_path.is_none() {
            return bad("epsilon_path", "epsilon_mode \"file\" needs epsilon_path".into());
        }
        Ok(())
    }

    /// The `ε` specification, reading the sequence file when needed.
    pub fn epsilon_spec(&self) -> Result<EpsilonSpec, ConfigError> {
        match self.epsilon_mode {
            EpsilonMode::Geometric => Ok(EpsilonSpec::Geometric),
            EpsilonMode::Thm1b => Ok(EpsilonSpec::Thm1b),
            EpsilonMode::File => {
                let path = self.epsilon_path.as_deref().expect("validated");
                read_epsilon_file(path).map(EpsilonSpec::Explicit)
            }
        }
    }
}

fn check_keys(map: &Map<String, Value>) -> Result<(), ConfigError> {
    match map.keys().find(|k| !KEYS.contains(&k.as_str())) {
        Some(k) => Err(ConfigError::Validation { key: k.clone(), message: "unknown key".into() }),
        None => Ok(()),
    }
}

/// The first key whose value alone fails to deserialize into the defaults.
fn first_bad_key(map: &Map<String, Value>) -> Option<&'static str> {
    KEYS.iter().copied().find(|k| {
        map.get(*k).is_some_and(|v| {
            let mut single = Map::new();
            single.insert(k.to_string(), v.clone());
            serde_json::from_value::<RunConfig>(Value::Object(single)).is_err()
        })
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    RunConfig::from_json(&text)
}

/// Whitespace- or comma-separated `ε_1, ε_2, ...`.
pub fn read_epsilon_file(path: &Path) -> Result<Vec<f64>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>().map_err(|e| ConfigError::Validation {
                key: "epsilon_path".into(),
                message: format!("{}: `{t}` is not a number ({e})", path.display()),
            })
        })
        .collect()
}
