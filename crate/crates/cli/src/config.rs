use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use smoothlab::spectral::{DEFAULT_MAX_N, HARD_MAX_N};

use crate::CliError;

/// Key/value parameters for one run. Lists are comma separated; integer
/// ranges may be written `a..=b` or `a..b`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    values: BTreeMap<String, String>,
    pub max_n: usize,
    /// Append `timestamp,wall_ms` columns to every row.
    pub timestamp: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            values: BTreeMap::new(),
            max_n: DEFAULT_MAX_N,
            timestamp: false,
        }
    }
}

impl ExperimentConfig {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parse `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "config line {}: expected key = value",
                    no + 1
                )));
            };
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        if key.is_empty() {
            return Err(CliError::Usage("empty config key".into()));
        }
        match key {
            "max_n" => self.set_max_n(parse_one(key, value)?)?,
            "timestamp" => self.timestamp = parse_one(key, value)?,
            _ => {
                self.values.insert(key.to_string(), value.to_string());
            }
        }
        Ok(())
    }

    /// Apply a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<(), CliError> {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("expected KEY=VALUE, got {pair:?}")))?;
        self.set(key.trim(), value.trim())
    }

    pub fn set_max_n(&mut self, max_n: usize) -> Result<(), CliError> {
        if max_n > HARD_MAX_N {
            return Err(CliError::Usage(format!(
                "--max-n {max_n} exceeds the hard limit {HARD_MAX_N}"
            )));
        }
        self.max_n = max_n;
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn value_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        self.get(key).map_or(Ok(default), |v| parse_one(key, v))
    }

    pub fn list_or<T: FromStr + Clone>(
        &self,
        key: &str,
        default: &[T],
    ) -> Result<Vec<T>, CliError> {
        let Some(raw) = self.get(key) else {
            return Ok(default.to_vec());
        };
        let items: Vec<T> = raw
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| parse_one(key, s))
            .collect::<Result<_, _>>()?;
        if items.is_empty() {
            return Err(CliError::Usage(format!("{key}: empty list")));
        }
        Ok(items)
    }

    /// Integer list where items may also be ranges `a..=b` / `a..b`.
    pub fn range_list_or(&self, key: &str, default: &[usize]) -> Result<Vec<usize>, CliError> {
        let Some(raw) = self.get(key) else {
            return Ok(default.to_vec());
        };
        let mut out = Vec::new();
        for item in raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if let Some((a, b)) = item.split_once("..=") {
                out.extend(parse_one::<usize>(key, a)?..=parse_one(key, b)?);
            } else if let Some((a, b)) = item.split_once("..") {
                out.extend(parse_one::<usize>(key, a)?..parse_one(key, b)?);
            } else {
                out.push(parse_one(key, item)?);
            }
        }
        if out.is_empty() {
            return Err(CliError::Usage(format!("{key}: empty list")));
        }
        Ok(out)
    }

    pub fn check_n(&self, n: usize) -> Result<(), CliError> {
        if n > self.max_n {
            return Err(CliError::Usage(format!(
                "n = {n} exceeds --max-n {} (raise it explicitly, up to {HARD_MAX_N})",
                self.max_n
            )));
        }
        Ok(())
    }
}

fn parse_one<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("{key}: cannot parse {value:?}")))
}
