//! Flat `key=value` parameters, merged from a config file and flags.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Params {
    values: BTreeMap<String, String>,
}

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Parses `key = value` lines. Blank lines and lines starting with `#`
    /// are skipped; a key may appear only once.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut params = Self::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fail = |reason: String| CliError::ConfigFile { path: path.to_owned(), line: i + 1, reason };
            let (key, value) = line.split_once('=').ok_or_else(|| fail("expected key=value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(fail("empty key".into()));
            }
            if params.values.insert(key.to_owned(), value.to_owned()).is_some() {
                return Err(fail(format!("duplicate key `{key}`")));
            }
        }
        Ok(params)
    }

    /// Inserts or replaces a value.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(key.to_owned(), value.into());
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    pub fn remove(&mut self, key: &str) -> Option<String> {
        self.values.remove(key)
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.raw(key).map(|v| parse_value(key, v)).transpose()
    }

    pub fn get_or<T>(&self, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// Comma-separated list.
    pub fn list<T>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T: FromStr,
        T::Err: Display,
    {
        let Some(raw) = self.raw(key) else { return Ok(None) };
        let items: Vec<T> = raw
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| parse_value(key, s))
            .collect::<Result<_>>()?;
        if items.is_empty() {
            return Err(CliError::param(key, "empty list"));
        }
        Ok(Some(items))
    }

    /// Rejects keys not in `allowed`.
    pub fn check_keys(&self, allowed: &[String]) -> Result<()> {
        match self.keys().find(|k| !allowed.iter().any(|a| a == k)) {
            Some(k) => Err(CliError::param(k, "not recognised by this command")),
            None => Ok(()),
        }
    }

    /// Writes the parameters back in the config-file format, sorted by key.
    pub fn write<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (k, v) in &self.values {
            writeln!(out, "{k}={v}")?;
        }
        Ok(())
    }
}

fn parse_value<T>(key: &str, raw: &str) -> Result<T>
where
    T: FromStr,
    T::Err: Display,
{
    raw.parse().map_err(|e: T::Err| CliError::param(key, format!("cannot parse `{raw}`: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Params> {
        Params::parse(text, Path::new("test.cfg"))
    }

    #[test]
    fn parses_comments_and_whitespace() {
        let p = parse("# sweep\n\ndelta = 0.01\nnmax=100\n  snapshots = 20, 40 ,60\n").unwrap();
        assert_eq!(p.get::<f64>("delta").unwrap(), Some(0.01));
        assert_eq!(p.get_or::<usize>("nmax", 1).unwrap(), 100);
        assert_eq!(p.list::<usize>("snapshots").unwrap(), Some(vec![20, 40, 60]));
        assert_eq!(p.get::<f64>("xmax").unwrap(), None);
    }

    #[test]
    fn rejects_malformed_lines() {
        let err = parse("delta 0.01").unwrap_err();
        assert!(matches!(err, CliError::ConfigFile { line: 1, .. }));
        assert!(parse("=3").is_err());
        assert!(matches!(parse("a=1\na=2").unwrap_err(), CliError::ConfigFile { line: 2, .. }));
    }

    #[test]
    fn bad_values_are_param_errors() {
        let p = parse("nmax = ten\nsnapshots = ,").unwrap();
        assert_eq!(p.get::<usize>("nmax").unwrap_err().exit_code(), 2);
        assert!(p.list::<usize>("snapshots").is_err());
    }

    #[test]
    fn set_overrides_and_write_round_trips() {
        let mut p = parse("delta=0.01\nnmax=100").unwrap();
        p.set("delta", "0.005");
        let mut buf = Vec::new();
        p.write(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "delta=0.005\nnmax=100\n");
        assert_eq!(parse(std::str::from_utf8(&buf).unwrap()).unwrap(), p);
    }

    #[test]
    fn unknown_keys_rejected() {
        let p = parse("delta=0.01\nbogus=1").unwrap();
        let allowed = vec!["delta".to_owned()];
        assert!(p.check_keys(&allowed).is_err());
    }
}
