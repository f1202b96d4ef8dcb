//! Flat key-value config files. Every CLI flag has a config-file equivalent
//! under the same name (without the leading dashes); explicit flags override
//! file values. The format round-trips: `parse(render(c)) == c`.

use std::collections::BTreeMap;

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<String, String>,
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {}: expected `key = value`", i + 1))
            })?;
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(ConfigMap { entries })
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Serialises back to the flat format; `parse(render(c)) == c`.
    #[cfg(test)]
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    /// CLI value if given, else the config entry parsed as `T`.
    pub fn opt<T: std::str::FromStr>(
        &self,
        cli: Option<T>,
        key: &str,
    ) -> Result<Option<T>, CliError> {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.entries.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                CliError::Usage(format!("config key `{key}`: cannot parse `{raw}`"))
            }),
        }
    }

    /// Like [`ConfigMap::opt`] but the value is required.
    pub fn req<T: std::str::FromStr>(&self, cli: Option<T>, key: &str) -> Result<T, CliError> {
        self.opt(cli, key)?
            .ok_or_else(|| CliError::Usage(format!("missing required parameter `--{key}`")))
    }

    /// Optional with a default.
    pub fn or<T: std::str::FromStr>(
        &self,
        cli: Option<T>,
        key: &str,
        default: T,
    ) -> Result<T, CliError> {
        Ok(self.opt(cli, key)?.unwrap_or(default))
    }
}

/// `min:max:count` with `count` grid points inclusive of both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Range {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.min + step * i as f64).collect()
    }
}

impl std::str::FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range `{s}` must be min:max:count"));
        }
        let min = parts[0].parse::<f64>().map_err(|e| e.to_string())?;
        let max = parts[1].parse::<f64>().map_err(|e| e.to_string())?;
        let count = parts[2].parse::<usize>().map_err(|e| e.to_string())?;
        if count == 0 {
            return Err("range count must be positive".into());
        }
        if max < min {
            return Err(format!("range `{s}`: max below min"));
        }
        Ok(Range { min, max, count })
    }
}
