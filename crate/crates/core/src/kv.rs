//! Flat `key = value` configuration text.
//!
//! One assignment per line; `#` starts a comment line; blank lines are
//! skipped. Keys are unique. Values are taken verbatim after trimming.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvMap {
    entries: Vec<(String, String, usize)>,
}

impl KvMap {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = KvMap::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            let (k, v) = l.split_once('=').ok_or_else(|| Error::Parse {
                line,
                msg: "expected `key = value`".into(),
            })?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty()
                || !k
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
            {
                return Err(Error::Parse {
                    line,
                    msg: format!("invalid key {k:?}"),
                });
            }
            if map.get(k).is_some() {
                return Err(Error::Parse {
                    line,
                    msg: format!("duplicate key {k:?}"),
                });
            }
            map.entries.push((k.to_string(), v.to_string(), line));
        }
        Ok(map)
    }

    /// Inserts or replaces a value (used for command-line overrides).
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        let value = value.into();
        match self.entries.iter_mut().find(|(k, _, _)| k == key) {
            Some(e) => e.1 = value,
            None => self.entries.push((key.to_string(), value, 0)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, _)| v.as_str())
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _, _)| k.as_str())
    }

    fn line_of(&self, key: &str) -> usize {
        self.entries
            .iter()
            .find(|(k, _, _)| k == key)
            .map_or(0, |e| e.2)
    }

    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| Error::Parse {
                line: self.line_of(key),
                msg: format!("cannot parse value {v:?} for key {key:?}"),
            }),
        }
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.parsed(key)?
            .ok_or_else(|| Error::param(format!("missing required key {key:?}")))
    }

    pub fn parsed_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.parsed(key)?.unwrap_or(default))
    }

    /// Comma-separated list value.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        let Some(v) = self.get(key) else {
            return Ok(None);
        };
        v.split(',')
            .map(|item| {
                let item = item.trim();
                item.parse().map_err(|_| Error::Parse {
                    line: self.line_of(key),
                    msg: format!("cannot parse list item {item:?} for key {key:?}"),
                })
            })
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }

    /// Rejects keys outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for (k, _, line) in &self.entries {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::Parse {
                    line: *line,
                    msg: format!("unknown key {k:?}"),
                });
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v, _) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_overrides() {
        let mut kv = KvMap::parse("# hi\nfamily = sbm\n\nn=100\ngrid = 1, 2,3\n").unwrap();
        assert_eq!(kv.get("family"), Some("sbm"));
        assert_eq!(kv.require::<usize>("n").unwrap(), 100);
        assert_eq!(kv.list::<u32>("grid").unwrap(), Some(vec![1, 2, 3]));
        kv.set("n", "7");
        assert_eq!(kv.require::<usize>("n").unwrap(), 7);
        assert_eq!(KvMap::parse(&kv.to_text()).unwrap().get("n"), Some("7"));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            KvMap::parse("a = 1\na = 2"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            KvMap::parse("nonsense"),
            Err(Error::Parse { line: 1, .. })
        ));
        let kv = KvMap::parse("n = x").unwrap();
        assert!(kv.require::<usize>("n").is_err());
        assert!(kv.check_keys(&["m"]).is_err());
    }
}
