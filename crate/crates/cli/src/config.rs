//! Plain-text configuration files: UTF-8 lines `key = value` with `#`
//! comments. Keys use the same names as the command-line flags; flags win
//! on conflict, so config values only fill in unset options.

use std::collections::HashMap;
use std::path::Path;

use crate::commands::CliError;

/// Every key any subcommand understands; anything else is rejected.
const KNOWN_KEYS: &[&str] = &[
    "nu", "omega", "g", "eps", "eta", "delta", "lambda", "kappa", "xi", "mu", "tau", "nmax",
    "figure", "branch", "chain", "target", "out", "lambda-min", "lambda-max", "step", "tol",
    "digits", "construction-tol", "equality-tol", "region-tol", "pole-tol",
];

#[derive(Debug, Default, Clone)]
pub struct Settings {
    values: HashMap<String, String>,
}

impl Settings {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let content = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut values = HashMap::new();
        for (lineno, raw) in content.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "{}:{}: expected `key = value`",
                    path.display(),
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!(
                    "{}:{}: unknown key `{key}`",
                    path.display(),
                    lineno + 1
                )));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { values })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|e| CliError::Usage(format!("config key `{key}`: {e}")))
            })
            .transpose()
    }

    pub fn i64(&self, key: &str) -> Result<Option<i64>, CliError> {
        self.get(key)
            .map(|v| {
                v.parse::<i64>()
                    .map_err(|e| CliError::Usage(format!("config key `{key}`: {e}")))
            })
            .transpose()
    }

    pub fn u32(&self, key: &str) -> Result<Option<u32>, CliError> {
        self.get(key)
            .map(|v| {
                v.parse::<u32>()
                    .map_err(|e| CliError::Usage(format!("config key `{key}`: {e}")))
            })
            .transpose()
    }

    pub fn string(&self, key: &str) -> Option<String> {
        self.get(key).map(str::to_string)
    }
}

/// Flag value if set, else config value, else an exit-2 usage error.
pub fn require_f64(flag: Option<f64>, cfg: &Settings, key: &str) -> Result<f64, CliError> {
    optional_f64(flag, cfg, key)?
        .ok_or_else(|| CliError::Usage(format!("missing --{key} (flag or config)")))
}

pub fn optional_f64(
    flag: Option<f64>,
    cfg: &Settings,
    key: &str,
) -> Result<Option<f64>, CliError> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg.f64(key),
    }
}

pub fn require_i64(flag: Option<i64>, cfg: &Settings, key: &str) -> Result<i64, CliError> {
    match flag {
        Some(v) => Ok(v),
        None => cfg
            .i64(key)?
            .ok_or_else(|| CliError::Usage(format!("missing --{key} (flag or config)"))),
    }
}
