//! Optional TOML config. Keys mirror the long flag names; flags win.

use std::path::Path;

use toml::{Table, Value};

use crate::ranges::parse_list;

#[derive(Debug, Default)]
pub struct Config {
    table: Table,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Config::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Config, String> {
        let table: Table = text.parse().map_err(|e: toml::de::Error| e.message().to_string())?;
        Ok(Config { table })
    }

    fn get(&self, key: &str) -> Option<&Value> {
        self.table
            .get(key)
            .or_else(|| self.table.get(&key.replace('-', "_")))
    }

    pub fn int(&self, key: &str) -> Result<Option<u64>, String> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
            Some(v) => Err(format!("config key {key:?} must be a non-negative integer, got {v}")),
        }
    }

    pub fn float(&self, key: &str) -> Result<Option<f64>, String> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Float(f)) => Ok(Some(*f)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(Value::String(s)) => s
                .parse()
                .map(Some)
                .map_err(|_| format!("config key {key:?}: not a number: {s:?}")),
            Some(v) => Err(format!("config key {key:?} must be a number, got {v}")),
        }
    }

    pub fn string(&self, key: &str) -> Result<Option<String>, String> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(v) => Err(format!("config key {key:?} must be a string, got {v}")),
        }
    }

    pub fn bool(&self, key: &str) -> Result<Option<bool>, String> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(*b)),
            Some(v) => Err(format!("config key {key:?} must be a boolean, got {v}")),
        }
    }

    /// A list given as `"3..7"`, `[3, 4, 5]` or a single integer.
    pub fn list(&self, key: &str) -> Result<Option<Vec<u64>>, String> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => parse_list(s).map(Some),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(vec![*i as u64])),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    Value::Integer(i) if *i >= 0 => Ok(*i as u64),
                    other => Err(format!("config key {key:?}: bad list item {other}")),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(v) => Err(format!("config key {key:?} must be a list, got {v}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_typed_keys() {
        let c = Config::parse(
            "r = 5\nk = \"3..5\"\ntol = 1e-12\nformat = \"json\"\npedantic = true\np_max = 3\n",
        )
        .unwrap();
        assert_eq!(c.int("r").unwrap(), Some(5));
        assert_eq!(c.list("k").unwrap(), Some(vec![3, 4, 5]));
        assert_eq!(c.list("r").unwrap(), Some(vec![5]));
        assert_eq!(c.float("tol").unwrap(), Some(1e-12));
        assert_eq!(c.string("format").unwrap().as_deref(), Some("json"));
        assert_eq!(c.bool("pedantic").unwrap(), Some(true));
        assert_eq!(c.int("p-max").unwrap(), Some(3));
        assert_eq!(c.int("n").unwrap(), None);
        assert!(c.int("format").is_err());
    }

    #[test]
    fn rejects_bad_toml() {
        assert!(Config::parse("r = ").is_err());
    }
}
