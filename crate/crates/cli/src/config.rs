//! Flat key-value config files with a single `[command]` section.
//!
//! ```text
//! [alpha-scan]
//! scheme = both
//! alpha_grid = 0.05:3.0:0.05
//! eta_a = 1.0
//! ```
//!
//! Keys mirror the long CLI flags with underscores; command-line flags win
//! over file values. All numeric fields accept scientific notation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Parsed config file: the section name and its key-value pairs.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    pub section: Option<String>,
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut section = None;
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError(format!("line {}: unclosed section", lineno + 1)))?
                    .trim();
                if section.is_some() {
                    return Err(ConfigError(format!(
                        "line {}: a config file holds exactly one [command] section",
                        lineno + 1
                    )));
                }
                section = Some(name.to_string());
                continue;
            }
            if section.is_none() {
                return Err(ConfigError(format!(
                    "line {}: key outside a [command] section",
                    lineno + 1
                )));
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError(format!("line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim().to_string();
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(ConfigError(format!("line {}: duplicate key {key}", lineno + 1)));
            }
        }
        Ok(Self { section, values })
    }

    /// Empty config, used when no --config was given.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn expect_section(&self, command: &str) -> Result<(), ConfigError> {
        match &self.section {
            None => Ok(()),
            Some(s) if s == command => Ok(()),
            Some(s) => Err(ConfigError(format!(
                "config section [{s}] does not match command {command}"
            ))),
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

/// Inclusive numeric grid `start:stop:step`; values are generated by index so
/// that grids are exactly reproducible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn len(&self) -> usize {
        ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.start + self.step * i as f64)
    }
}

impl std::str::FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("grid '{s}' must be start:stop:step"));
        }
        let parse = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| format!("grid '{s}': {e}"))
        };
        let grid = Grid {
            start: parse(parts[0])?,
            stop: parse(parts[1])?,
            step: parse(parts[2])?,
        };
        if !(grid.step > 0.0) {
            return Err(format!("grid '{s}': step must be positive"));
        }
        if grid.stop < grid.start {
            return Err(format!("grid '{s}': stop must be >= start"));
        }
        Ok(grid)
    }
}

/// Half-open pair `lo:hi` for amplitude search ranges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl std::str::FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| format!("range '{s}' must be lo:hi"))?;
        let lo = lo.trim().parse::<f64>().map_err(|e| format!("range '{s}': {e}"))?;
        let hi = hi.trim().parse::<f64>().map_err(|e| format!("range '{s}': {e}"))?;
        if !(hi > lo) {
            return Err(format!("range '{s}': need lo < hi"));
        }
        Ok(Range { lo, hi })
    }
}
