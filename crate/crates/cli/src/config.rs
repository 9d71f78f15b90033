//! Flat key=value configuration files.
//!
//! Precedence is: command-line flag, then config file, then built-in
//! default. Keys use the long flag names (`n`, `t`, `lambda`, ...). Lines
//! starting with `#` and blank lines are ignored.

use anyhow::{bail, Context, Result};
use std::collections::HashMap;
use std::path::Path;

#[derive(Debug, Default, Clone)]
pub struct Config {
    values: HashMap<String, String>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        let mut values = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!(
                    "{}:{}: expected key=value, got {line:?}",
                    path.display(),
                    lineno + 1
                );
            };
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    /// Flag value > config value > default.
    pub fn resolve<T: std::str::FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.values.get(key) {
            Some(raw) => raw
                .parse()
                .map_err(|e| anyhow::anyhow!("config key {key}={raw}: {e}")),
            None => Ok(default),
        }
    }

    /// Optional value: flag > config > None.
    pub fn resolve_opt<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| anyhow::anyhow!("config key {key}={raw}: {e}")),
            None => Ok(None),
        }
    }
}

/// Parse a grid argument: either a comma list (`0.5,1,2`) or an inclusive
/// linspace `start:stop:count`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    if let Some((range, count)) = split_linspace(text) {
        let (start, stop) = range;
        if count < 1 {
            bail!("grid {text:?}: count must be >= 1");
        }
        if count == 1 {
            return Ok(vec![start]);
        }
        let step = (stop - start) / (count as f64 - 1.0);
        return Ok((0..count).map(|i| start + step * i as f64).collect());
    }
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .with_context(|| format!("grid value {tok:?}"))
        })
        .collect()
}

fn split_linspace(text: &str) -> Option<((f64, f64), usize)> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return None;
    }
    let start = parts[0].trim().parse().ok()?;
    let stop = parts[1].trim().parse().ok()?;
    let count = parts[2].trim().parse().ok()?;
    Some(((start, stop), count))
}
