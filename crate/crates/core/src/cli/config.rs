//! `key = value` run configuration files; `#` starts a comment.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

const KEYS: &[&str] = &["h", "L", "N", "depth", "pattern", "mode", "ranks", "N1", "N2", "levels"];

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Parse {
                    line: i + 1,
                    column: line.len() - line.trim_start().len() + 1,
                    message: "expected key = value".into(),
                });
            };
            let key = k.trim();
            if !KEYS.contains(&key) {
                return Err(Error::Parse {
                    line: i + 1,
                    column: k.len() - k.trim_start().len() + 1,
                    message: format!("unknown key {key:?}"),
                });
            }
            values.insert(key.to_string(), v.trim().trim_matches('"').to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Flag value if given, else the file's value parsed.
    pub fn pick<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|_| Error::Config(format!("bad value {v:?} for {key}"))))
            .transpose()
    }
}
