use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_rational::BigRational;

use latmoment::arith::parse_rational;
use latmoment::bounds::HeightHypothesis;
use latmoment::{FieldElement, NumberField};

/// Bad input detected before any computation starts. Maps to exit status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn bad(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

pub const KEYS: &[&str] = &[
    "field", "t", "n", "v", "k", "c0", "c1", "c-s", "trunc-p", "trunc-t", "samples", "seed", "output", "format",
    "lambda", "s", "x", "rows", "p", "suite", "ratio",
];

/// Flat key=value settings: the config file first, then command-line flags.
#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('_', "-")
}

impl RunConfig {
    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let mut cfg = RunConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) =
                line.split_once('=').ok_or_else(|| bad(format!("config line {}: expected key=value", i + 1)))?;
            cfg.set(k, v.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> anyhow::Result<()> {
        let key = normalize(key);
        if !KEYS.contains(&key.as_str()) {
            return Err(bad(format!("unknown config key `{key}`")));
        }
        self.values.insert(key, value.to_string());
        Ok(())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> anyhow::Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s.trim().parse().map(Some).map_err(|_| bad(format!("invalid value `{s}` for {key}"))),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> anyhow::Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> anyhow::Result<T> {
        self.get(key)?.ok_or_else(|| bad(format!("missing required --{key}")))
    }

    /// Comma-separated list; `None` when the key is absent.
    pub fn list<T: FromStr>(&self, key: &str) -> anyhow::Result<Option<Vec<T>>> {
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s
                .split(',')
                .map(|x| x.trim().parse().map_err(|_| bad(format!("invalid entry `{x}` in {key}"))))
                .collect::<anyhow::Result<Vec<T>>>()
                .map(Some),
        }
    }

    pub fn rational_list(&self, key: &str) -> anyhow::Result<Option<Vec<BigRational>>> {
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s
                .split(',')
                .map(|x| parse_rational(x).ok_or_else(|| bad(format!("invalid rational `{x}` in {key}"))))
                .collect::<anyhow::Result<Vec<_>>>()
                .map(Some),
        }
    }

    pub fn field(&self) -> anyhow::Result<NumberField> {
        let desc = self.raw("field").unwrap_or("Q");
        Ok(NumberField::from_descriptor(desc)?)
    }

    /// Cyclotomic defaults unless c0 or c1 is set; a missing one keeps its default.
    pub fn hypothesis(&self) -> anyhow::Result<HeightHypothesis> {
        let def = HeightHypothesis::cyclotomic_defaults();
        let c0: Option<f64> = self.get("c0")?;
        let c1: Option<f64> = self.get("c1")?;
        if c0.is_none() && c1.is_none() {
            return Ok(def);
        }
        Ok(HeightHypothesis::new(c0.unwrap_or(def.c0), c1.unwrap_or(def.c1))?)
    }
}

/// `a:b:c` gives a + bθ + cθ²; missing trailing coordinates are zero.
pub fn parse_element(field: &NumberField, s: &str) -> anyhow::Result<FieldElement> {
    let d = field.degree();
    let mut coords: Vec<BigRational> = s
        .split(':')
        .map(|x| parse_rational(x).ok_or_else(|| bad(format!("invalid coordinate `{x}` in `{s}`"))))
        .collect::<anyhow::Result<_>>()?;
    if coords.len() > d {
        return Err(bad(format!("`{s}` has {} coordinates but {field} has degree {d}", coords.len())));
    }
    coords.resize(d, BigRational::from_integer(0.into()));
    Ok(field.element(coords))
}

pub fn parse_elements(field: &NumberField, s: &str) -> anyhow::Result<Vec<FieldElement>> {
    s.split(',').map(|x| parse_element(field, x.trim())).collect()
}
