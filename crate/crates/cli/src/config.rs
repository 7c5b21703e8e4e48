//! Flat `key=value` run configuration with a canonical text form.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use mwave::transform::Manifold;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Command {
    Kernel,
    Validate,
    Cwt,
    Reconstruct,
    Holder,
    Localize,
    Accept,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Kernel,
        Command::Validate,
        Command::Cwt,
        Command::Reconstruct,
        Command::Holder,
        Command::Localize,
        Command::Accept,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Kernel => "kernel",
            Command::Validate => "validate",
            Command::Cwt => "cwt",
            Command::Reconstruct => "reconstruct",
            Command::Holder => "holder",
            Command::Localize => "localize",
            Command::Accept => "accept",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown command `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Float,
    FloatList,
    Count,
    Text,
    Window,
    Theta,
    Manifold,
    Path,
}

use Command::*;

/// Every accepted key, its value kind and the commands that read it.
const KEYS: &[(&str, Kind, &[Command])] = &[
    ("expect-alpha", Kind::Float, &[Holder]),
    ("grid", Kind::Count, &[Kernel]),
    ("input", Kind::Path, &[Cwt, Reconstruct, Holder]),
    ("l-max", Kind::Count, &[Kernel, Validate]),
    ("manifold", Kind::Manifold, &[Kernel, Localize]),
    ("max-ratio", Kind::Float, &[Localize]),
    ("nodes-per-decade", Kind::Count, &[Reconstruct]),
    ("output", Kind::Path, &[Kernel, Validate, Cwt, Reconstruct, Holder, Localize, Accept]),
    ("point", Kind::FloatList, &[Kernel]),
    ("power", Kind::Count, &[Localize]),
    ("rel-err", Kind::Float, &[Reconstruct]),
    ("report", Kind::Text, &[Kernel]),
    ("resolution", Kind::Count, &[Holder]),
    ("scales", Kind::Count, &[Holder]),
    ("symbol", Kind::Text, &[Kernel, Cwt, Reconstruct, Holder, Localize]),
    ("t", Kind::FloatList, &[Kernel, Validate, Cwt, Localize]),
    ("t-max", Kind::Float, &[Reconstruct]),
    ("t-min", Kind::Float, &[Reconstruct]),
    ("target", Kind::Text, &[Validate]),
    ("test-field", Kind::Count, &[Holder]),
    ("theta", Kind::Theta, &[Kernel, Validate]),
    ("tolerance", Kind::Float, &[Validate, Reconstruct, Holder]),
    ("window", Kind::Window, &[Holder]),
];

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    FloatList(Vec<f64>),
    Count(usize),
    Text(String),
    Window(f64, f64),
    Theta(ThetaSpec),
    Manifold(Manifold),
    Path(PathBuf),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Float(x) => write!(f, "{x}"),
            Value::FloatList(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                f.write_str(&parts.join(","))
            }
            Value::Count(n) => write!(f, "{n}"),
            Value::Text(s) => f.write_str(s),
            Value::Window(a, b) => write!(f, "{a}:{b}"),
            Value::Theta(t) => write!(f, "{t}"),
            Value::Manifold(m) => write!(f, "{m}"),
            Value::Path(p) => write!(f, "{}", p.display()),
        }
    }
}

/// `lo:hi:n`, inclusive of both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl ThetaSpec {
    pub fn samples(&self) -> Vec<f64> {
        mwave::numeric::linspace(self.lo, self.hi, self.n)
    }
}

impl fmt::Display for ThetaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.n)
    }
}

impl FromStr for ThetaSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected lo:hi:n, got `{s}`"));
        }
        let n: usize = parts[2].trim().parse().map_err(|_| format!("bad sample count `{}`", parts[2]))?;
        if n < 1 {
            return Err("sample count must be ≥ 1".into());
        }
        Ok(Self {
            lo: parse_angle(parts[0])?,
            hi: parse_angle(parts[1])?,
            n,
        })
    }
}

/// A number, optionally with a `pi` factor: `1.5`, `pi`, `-pi`, `2pi`,
/// `pi/4`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let bad = || format!("bad angle `{s}`");
    let (body, div) = match s.split_once('/') {
        Some((a, b)) => (a, b.trim().parse::<f64>().map_err(|_| bad())?),
        None => (s, 1.0),
    };
    let body = body.trim();
    let value = if let Some(prefix) = body.strip_suffix("pi") {
        let k = match prefix.trim() {
            "" | "+" => 1.0,
            "-" => -1.0,
            p => p.trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
        };
        k * PI
    } else {
        body.parse::<f64>().map_err(|_| bad())?
    };
    Ok(value / div)
}

fn parse_float(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("not a number: `{s}`"))?;
    if !v.is_finite() {
        return Err(format!("not finite: `{s}`"));
    }
    Ok(v)
}

fn parse_value(kind: Kind, raw: &str) -> Result<Value, String> {
    let raw = raw.trim();
    Ok(match kind {
        Kind::Float => Value::Float(parse_float(raw)?),
        Kind::FloatList => Value::FloatList(
            raw.split(',')
                .map(parse_float)
                .collect::<Result<Vec<_>, _>>()?,
        ),
        Kind::Count => Value::Count(raw.parse().map_err(|_| format!("not a non-negative integer: `{raw}`"))?),
        Kind::Text => {
            if raw.is_empty() || raw.contains(['\n', '=']) {
                return Err(format!("invalid text value `{raw}`"));
            }
            Value::Text(raw.to_string())
        }
        Kind::Window => {
            let (a, b) = raw.split_once(':').ok_or_else(|| format!("expected lo:hi, got `{raw}`"))?;
            let (a, b) = (parse_float(a)?, parse_float(b)?);
            if !(a > 0.0 && b > a) {
                return Err(format!("window `{raw}` must satisfy 0 < lo < hi"));
            }
            Value::Window(a, b)
        }
        Kind::Theta => Value::Theta(raw.parse()?),
        Kind::Manifold => Value::Manifold(raw.parse().map_err(|e: mwave::Error| e.to_string())?),
        Kind::Path => {
            if raw.is_empty() {
                return Err("empty path".into());
            }
            Value::Path(PathBuf::from(raw))
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    command: Command,
    entries: BTreeMap<&'static str, Value>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            entries: BTreeMap::new(),
        }
    }

    pub fn command(&self) -> Command {
        self.command
    }

    /// Sets `key` from its textual value. Unknown keys and keys the command
    /// does not read are rejected.
    pub fn set(&mut self, key: &str, raw: &str) -> Result<(), CliError> {
        let &(name, kind, commands) = KEYS
            .iter()
            .find(|(k, _, _)| *k == key)
            .ok_or_else(|| CliError::Usage(format!("unknown key `{key}`")))?;
        if !commands.contains(&self.command) {
            return Err(CliError::Usage(format!("--{key} is not accepted by `{}`", self.command)));
        }
        let value = parse_value(kind, raw).map_err(|e| CliError::Usage(format!("--{key}: {e}")))?;
        self.entries.insert(name, value);
        Ok(())
    }

    /// Reads `key=value` lines; blank lines and `#` comments are skipped. A
    /// `command=` line, if present, must name this command.
    pub fn merge_text(&mut self, text: &str) -> Result<(), CliError> {
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", no + 1)))?;
            let k = k.trim();
            if k == "command" {
                let c: Command = v.trim().parse()?;
                if c != self.command {
                    return Err(CliError::Usage(format!(
                        "config line {}: command `{c}` does not match `{}`",
                        no + 1,
                        self.command
                    )));
                }
                continue;
            }
            self.set(k, v)
                .map_err(|e| CliError::Usage(format!("config line {}: {}", no + 1, e.message())))?;
        }
        Ok(())
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?;
        self.merge_text(&text)
    }

    /// `command=…` followed by the set keys in sorted order.
    pub fn canonical(&self) -> String {
        let mut out = format!("command={}\n", self.command);
        for (k, v) in &self.entries {
            out.push_str(&format!("{k}={v}\n"));
        }
        out
    }

    pub fn from_canonical(text: &str) -> Result<Self, CliError> {
        let first = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'))
            .ok_or_else(|| CliError::Usage("empty configuration".into()))?;
        let command = first
            .strip_prefix("command=")
            .ok_or_else(|| CliError::Usage("configuration must start with command=".into()))?
            .trim()
            .parse()?;
        let mut cfg = Self::new(command);
        cfg.merge_text(text)?;
        Ok(cfg)
    }

    /// Hex SHA-256 of the canonical form without `output`, so the same
    /// computation hashes the same wherever it is written.
    pub fn hash(&self) -> String {
        let mut clone = self.clone();
        clone.entries.remove("output");
        Sha256::digest(clone.canonical().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.get(key)
    }

    pub fn float(&self, key: &str) -> Option<f64> {
        match self.get(key) {
            Some(Value::Float(x)) => Some(*x),
            _ => None,
        }
    }

    pub fn floats(&self, key: &str) -> Option<&[f64]> {
        match self.get(key) {
            Some(Value::FloatList(v)) => Some(v),
            _ => None,
        }
    }

    pub fn count(&self, key: &str) -> Option<usize> {
        match self.get(key) {
            Some(Value::Count(n)) => Some(*n),
            _ => None,
        }
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        match self.get(key) {
            Some(Value::Text(s)) => Some(s),
            _ => None,
        }
    }

    pub fn window(&self, key: &str) -> Option<(f64, f64)> {
        match self.get(key) {
            Some(Value::Window(a, b)) => Some((*a, *b)),
            _ => None,
        }
    }

    pub fn theta(&self) -> Option<ThetaSpec> {
        match self.get("theta") {
            Some(Value::Theta(t)) => Some(*t),
            _ => None,
        }
    }

    pub fn manifold(&self) -> Option<Manifold> {
        match self.get("manifold") {
            Some(Value::Manifold(m)) => Some(*m),
            _ => None,
        }
    }

    pub fn path(&self, key: &str) -> Option<&Path> {
        match self.get(key) {
            Some(Value::Path(p)) => Some(p),
            _ => None,
        }
    }

    pub fn require<T>(&self, key: &str, v: Option<T>) -> Result<T, CliError> {
        v.ok_or_else(|| CliError::Usage(format!("`{}` requires --{key}", self.command)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("-pi").unwrap(), -PI);
        assert_eq!(parse_angle("2pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_angle("pi/4").unwrap(), PI / 4.0);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert!(parse_angle("tau").is_err());
    }

    #[test]
    fn theta_spec() {
        let t: ThetaSpec = "0:pi:512".parse().unwrap();
        assert_eq!((t.lo, t.hi, t.n), (0.0, PI, 512));
        assert_eq!(t.samples().len(), 512);
        assert!("0:pi".parse::<ThetaSpec>().is_err());
    }

    #[test]
    fn every_key_is_read_by_some_command() {
        for (k, _, cmds) in KEYS {
            assert!(!cmds.is_empty(), "{k}");
        }
        let mut sorted: Vec<&str> = KEYS.iter().map(|k| k.0).collect();
        sorted.sort();
        assert_eq!(sorted, KEYS.iter().map(|k| k.0).collect::<Vec<_>>());
    }
}
