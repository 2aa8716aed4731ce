//! Experiment configuration from a flat `key = value` file and flags.
//!
//! Every value is first collected as a string under its canonical key
//! (flags override file entries), then each subcommand parses the keys it
//! understands. Any failure names the offending field.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fqnoise_core::encodings::EncodingKind;
use fqnoise_core::noise::LambdaMode;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

pub type ConfigResult<T> = std::result::Result<T, ConfigError>;

/// Canonical key for a flag or file key: lower case, `-` folded to `_`.
/// `L` and `K` keep their case.
pub fn canonical_key(key: &str) -> String {
    let key = key.trim();
    if key == "L" || key == "K" {
        return key.to_string();
    }
    key.replace('-', "_").to_lowercase()
}

pub fn parse_config_file(text: &str) -> ConfigResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            ConfigError::new(format!("line {}", lineno + 1), "expected `key = value`")
        })?;
        let key = canonical_key(k);
        if key.is_empty() {
            return Err(ConfigError::new(
                format!("line {}", lineno + 1),
                "empty key",
            ));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("expected csv or json, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    WorstCase,
}

impl Mode {
    pub fn lambda_mode(self) -> LambdaMode {
        match self {
            Mode::Exact => LambdaMode::ExactDepolarizing,
            Mode::WorstCase => LambdaMode::WorstCase,
        }
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(Mode::Exact),
            "worst-case" | "worst_case" => Ok(Mode::WorstCase),
            _ => Err(format!("expected exact or worst-case, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncodingChoice {
    Local,
    Jw1d,
    Jw2dSnake,
    BravyiKitaev,
}

impl EncodingChoice {
    pub fn kind(self, phi0: usize) -> EncodingKind {
        match self {
            EncodingChoice::Local => EncodingKind::Local { phi0 },
            EncodingChoice::Jw1d => EncodingKind::Jw1d,
            EncodingChoice::Jw2dSnake => EncodingKind::Jw2dSnake,
            EncodingChoice::BravyiKitaev => EncodingKind::BravyiKitaev,
        }
    }
}

impl FromStr for EncodingChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "local" => Ok(EncodingChoice::Local),
            "jw1d" => Ok(EncodingChoice::Jw1d),
            "jw2d" | "jw2d_snake" => Ok(EncodingChoice::Jw2dSnake),
            "bk" | "bravyi_kitaev" => Ok(EncodingChoice::BravyiKitaev),
            _ => Err(format!(
                "unknown encoding `{s}` (local, jw1d, jw2d_snake, bravyi_kitaev)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sweep {
    Size,
    Momentum,
}

impl FromStr for Sweep {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "size" => Ok(Sweep::Size),
            "momentum" => Ok(Sweep::Momentum),
            _ => Err(format!("expected size or momentum, got `{s}`")),
        }
    }
}

/// Merged string settings plus the set of keys a subcommand accepts.
#[derive(Debug, Clone)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    /// File entries first, then flags on top.
    pub fn merge(file: BTreeMap<String, String>, flags: &[(String, String)]) -> Self {
        let mut values = file;
        for (k, v) in flags {
            values.insert(canonical_key(k), v.clone());
        }
        Self { values }
    }

    pub fn from_sources(file: Option<&Path>, flags: &[(String, String)]) -> ConfigResult<Self> {
        let parsed = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    ConfigError::new("config", format!("cannot read {}: {e}", path.display()))
                })?;
                parse_config_file(&text)?
            }
            None => BTreeMap::new(),
        };
        Ok(Self::merge(parsed, flags))
    }

    pub fn require_known(&self, allowed: &[&str], command: &str) -> ConfigResult<()> {
        for key in self.values.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(ConfigError::new(
                    key.clone(),
                    format!("not used by `{command}`"),
                ));
            }
        }
        Ok(())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> ConfigResult<T>
    where
        T::Err: fmt::Display,
    {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .trim()
                .parse()
                .map_err(|e: T::Err| ConfigError::new(key, e.to_string())),
        }
    }

    pub fn get_opt<T: FromStr>(&self, key: &str) -> ConfigResult<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.raw(key)
            .map(|v| {
                v.trim()
                    .parse()
                    .map_err(|e: T::Err| ConfigError::new(key, e.to_string()))
            })
            .transpose()
    }

    /// Comma-separated list; integer lists also accept `start:stop:step`.
    pub fn get_list<T: FromStr + Copy>(&self, key: &str, default: &[T]) -> ConfigResult<Vec<T>>
    where
        T::Err: fmt::Display,
    {
        let Some(v) = self.raw(key) else {
            return Ok(default.to_vec());
        };
        let items: Vec<T> = v
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse()
                    .map_err(|e: T::Err| ConfigError::new(key, format!("`{s}`: {e}")))
            })
            .collect::<ConfigResult<_>>()?;
        if items.is_empty() {
            return Err(ConfigError::new(key, "empty list"));
        }
        Ok(items)
    }

    pub fn get_usize_list(&self, key: &str, default: &[usize]) -> ConfigResult<Vec<usize>> {
        if let Some(v) = self.raw(key) {
            if v.contains(':') {
                return parse_range(key, v);
            }
        }
        self.get_list(key, default)
    }
}

fn parse_range(key: &str, v: &str) -> ConfigResult<Vec<usize>> {
    let parts: Vec<&str> = v.split(':').map(str::trim).collect();
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|e| ConfigError::new(key, format!("`{s}`: {e}")))
    };
    let (start, stop, step) = match parts.as_slice() {
        [a, b] => (num(a)?, num(b)?, 1),
        [a, b, c] => (num(a)?, num(b)?, num(c)?),
        _ => return Err(ConfigError::new(key, "range must be start:stop[:step]")),
    };
    if step == 0 || stop < start {
        return Err(ConfigError::new(
            key,
            "range needs step > 0 and stop >= start",
        ));
    }
    Ok((start..=stop).step_by(step).collect())
}

pub fn check(cond: bool, field: &str, message: impl Into<String>) -> ConfigResult<()> {
    if cond {
        Ok(())
    } else {
        Err(ConfigError::new(field, message))
    }
}

pub fn check_p(field: &str, p: f64, max: f64) -> ConfigResult<()> {
    check(
        (0.0..=max).contains(&p),
        field,
        format!("p = {p} must lie in [0, {max}]"),
    )
}

/// Output destination and format, shared by every subcommand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Output {
    pub fn from_settings(s: &Settings) -> ConfigResult<Self> {
        Ok(Self {
            format: s.get("format", Format::Csv)?,
            out: s.get_opt::<PathBuf>("out")?,
        })
    }
}

pub const OUTPUT_KEYS: [&str; 2] = ["format", "out"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let file = parse_config_file("# sweep\np = 0.1\nL=8 # size\nn-occ = 3\n").unwrap();
        let s = Settings::merge(file, &[("p".into(), "0.2".into())]);
        assert_eq!(s.get::<f64>("p", 0.0).unwrap(), 0.2);
        assert_eq!(s.get::<usize>("L", 0).unwrap(), 8);
        assert_eq!(s.get::<usize>("n_occ", 0).unwrap(), 3);
    }

    #[test]
    fn errors_name_field() {
        let s = Settings::merge(
            BTreeMap::new(),
            &[("p".into(), "abc".into()), ("depth".into(), "1,x".into())],
        );
        assert_eq!(s.get::<f64>("p", 0.0).unwrap_err().field, "p");
        assert_eq!(
            s.get_list::<usize>("depth", &[1]).unwrap_err().field,
            "depth"
        );
        assert_eq!(s.require_known(&["p"], "x").unwrap_err().field, "depth");
        assert!(parse_config_file("nonsense").is_err());
    }

    #[test]
    fn ranges() {
        let s = Settings::merge(BTreeMap::new(), &[("n_grid".into(), "20:60:20".into())]);
        assert_eq!(s.get_usize_list("n_grid", &[]).unwrap(), vec![20, 40, 60]);
    }
}
