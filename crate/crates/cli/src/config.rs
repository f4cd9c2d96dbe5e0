//! Experiment configuration files.
//!
//! A config is TOML restricted to an optional top-level `experiment` name and
//! a `[params]` table. Every experiment publishes its parameter schema; keys
//! outside the schema, type mismatches and out-of-domain values are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Int,
    Float,
    Str,
    IntList,
    FloatList,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Int => "integer",
            Kind::Float => "float",
            Kind::Str => "string",
            Kind::IntList => "list of integers",
            Kind::FloatList => "list of floats",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Str(String),
    IntList(Vec<i64>),
    FloatList(Vec<f64>),
}

impl Value {
    fn to_toml(&self) -> toml::Value {
        match self {
            Value::Int(i) => toml::Value::Integer(*i),
            Value::Float(x) => toml::Value::Float(*x),
            Value::Str(s) => toml::Value::String(s.clone()),
            Value::IntList(v) => toml::Value::Array(v.iter().map(|i| toml::Value::Integer(*i)).collect()),
            Value::FloatList(v) => toml::Value::Array(v.iter().map(|x| toml::Value::Float(*x)).collect()),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Int(i) => (*i).into(),
            Value::Float(x) => (*x).into(),
            Value::Str(s) => s.clone().into(),
            Value::IntList(v) => v.clone().into(),
            Value::FloatList(v) => v.clone().into(),
        }
    }
}

/// Domain check on a parsed value; `Err` carries the reason.
pub type Check = fn(&Value) -> Result<(), String>;

pub struct ParamSpec {
    pub key: &'static str,
    pub kind: Kind,
    pub default: fn() -> Value,
    pub check: Check,
    pub doc: &'static str,
}

fn floats(v: &Value) -> Vec<f64> {
    match v {
        Value::Int(i) => vec![*i as f64],
        Value::Float(x) => vec![*x],
        Value::IntList(l) => l.iter().map(|&i| i as f64).collect(),
        Value::FloatList(l) => l.clone(),
        Value::Str(_) => Vec::new(),
    }
}

fn all(v: &Value, ok: impl Fn(f64) -> bool, what: &str) -> Result<(), String> {
    match floats(v).into_iter().find(|x| !ok(*x)) {
        Some(bad) => Err(format!("{bad} is not {what}")),
        None => Ok(()),
    }
}

pub fn positive(v: &Value) -> Result<(), String> {
    all(v, |x| x > 0.0 && x.is_finite(), "positive")
}

pub fn non_negative(v: &Value) -> Result<(), String> {
    all(v, |x| x >= 0.0 && x.is_finite(), "non-negative")
}

pub fn finite(v: &Value) -> Result<(), String> {
    all(v, f64::is_finite, "finite")
}

pub fn probability(v: &Value) -> Result<(), String> {
    all(v, |x| x > 0.0 && x < 1.0, "in (0, 1)")
}

pub fn any(_: &Value) -> Result<(), String> {
    Ok(())
}

pub fn non_empty_positive(v: &Value) -> Result<(), String> {
    if floats(v).is_empty() {
        return Err("list is empty".into());
    }
    positive(v)
}

/// Normalized parameter table with typed accessors.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Params(BTreeMap<String, Value>);

impl Params {
    fn get(&self, key: &str) -> &Value {
        self.0.get(key).unwrap_or_else(|| panic!("parameter `{key}` missing from schema"))
    }

    pub fn f64(&self, key: &str) -> f64 {
        floats(self.get(key))[0]
    }

    pub fn usize(&self, key: &str) -> usize {
        match self.get(key) {
            Value::Int(i) => *i as usize,
            v => panic!("parameter `{key}` is {v:?}, not an integer"),
        }
    }

    pub fn str(&self, key: &str) -> &str {
        match self.get(key) {
            Value::Str(s) => s,
            v => panic!("parameter `{key}` is {v:?}, not a string"),
        }
    }

    pub fn f64_list(&self, key: &str) -> Vec<f64> {
        floats(self.get(key))
    }

    pub fn usize_list(&self, key: &str) -> Vec<usize> {
        match self.get(key) {
            Value::IntList(l) => l.iter().map(|&i| i as usize).collect(),
            v => panic!("parameter `{key}` is {v:?}, not an integer list"),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Value)> {
        self.0.iter()
    }

    /// Overrides one value, re-running the schema checks.
    pub fn set(&mut self, specs: &[ParamSpec], key: &str, value: Value) -> Result<(), CliError> {
        let spec = specs.iter().find(|s| s.key == key).ok_or_else(|| unknown_key(key, specs))?;
        (spec.check)(&value).map_err(|reason| CliError::Domain { key: key.into(), reason })?;
        self.0.insert(key.into(), value);
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Object(self.0.iter().map(|(k, v)| (k.clone(), v.to_json())).collect())
    }
}

fn unknown_key(key: &str, specs: &[ParamSpec]) -> CliError {
    CliError::UnknownKey { key: key.into(), valid: specs.iter().map(|s| s.key.to_string()).collect() }
}

fn convert(key: &str, kind: Kind, raw: &toml::Value) -> Result<Value, CliError> {
    let mismatch = || CliError::Type { key: key.into(), expected: kind, found: raw.type_str().into() };
    let int = |v: &toml::Value| v.as_integer();
    let float = |v: &toml::Value| v.as_float().or_else(|| v.as_integer().map(|i| i as f64));
    Ok(match kind {
        Kind::Int => Value::Int(int(raw).ok_or_else(mismatch)?),
        Kind::Float => Value::Float(float(raw).ok_or_else(mismatch)?),
        Kind::Str => Value::Str(raw.as_str().ok_or_else(mismatch)?.to_string()),
        Kind::IntList => {
            let arr = raw.as_array().ok_or_else(mismatch)?;
            Value::IntList(arr.iter().map(|v| int(v).ok_or_else(mismatch)).collect::<Result<_, _>>()?)
        }
        Kind::FloatList => {
            let arr = raw.as_array().ok_or_else(mismatch)?;
            Value::FloatList(arr.iter().map(|v| float(v).ok_or_else(mismatch)).collect::<Result<_, _>>()?)
        }
    })
}

/// Parses config text for `experiment` and fills defaults.
pub fn parse_params(text: &str, experiment: &str, specs: &[ParamSpec]) -> Result<Params, CliError> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Parse(e.to_string().trim_end().to_string()))?;
    let mut given = toml::Table::new();
    for (key, value) in table {
        match (key.as_str(), value) {
            ("experiment", toml::Value::String(name)) => {
                if name != experiment {
                    return Err(CliError::ExperimentMismatch { config: name, requested: experiment.into() });
                }
            }
            ("params", toml::Value::Table(t)) => given = t,
            (other, _) => {
                return Err(CliError::UnknownKey { key: other.into(), valid: vec!["experiment".into(), "[params]".into()] })
            }
        }
    }
    if let Some(key) = given.keys().find(|k| !specs.iter().any(|s| s.key == k.as_str())) {
        return Err(unknown_key(key, specs));
    }
    let mut out = BTreeMap::new();
    for spec in specs {
        let value = match given.get(spec.key) {
            Some(raw) => convert(spec.key, spec.kind, raw)?,
            None => (spec.default)(),
        };
        (spec.check)(&value).map_err(|reason| CliError::Domain { key: spec.key.into(), reason })?;
        out.insert(spec.key.to_string(), value);
    }
    Ok(Params(out))
}

pub fn load_params(path: &Path, experiment: &str, specs: &[ParamSpec]) -> Result<Params, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_params(&text, experiment, specs)
}

pub fn defaults(specs: &[ParamSpec]) -> Params {
    Params(specs.iter().map(|s| (s.key.to_string(), (s.default)())).collect())
}

/// The normalized config as TOML text, every key explicit.
pub fn normalized_toml(experiment: &str, params: &Params) -> String {
    let mut p = toml::Table::new();
    for (k, v) in &params.0 {
        p.insert(k.clone(), v.to_toml());
    }
    let mut root = toml::Table::new();
    root.insert("experiment".into(), toml::Value::String(experiment.into()));
    root.insert("params".into(), toml::Value::Table(p));
    toml::to_string(&root).expect("plain tables always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn specs() -> Vec<ParamSpec> {
        vec![
            ParamSpec { key: "epsilon", kind: Kind::Float, default: || Value::Float(0.1), check: positive, doc: "" },
            ParamSpec { key: "steps", kind: Kind::IntList, default: || Value::IntList(vec![1, 2]), check: non_empty_positive, doc: "" },
        ]
    }

    #[test]
    fn empty_file_gives_defaults() {
        let p = parse_params("", "x", &specs()).unwrap();
        assert_eq!(p, defaults(&specs()));
        assert_eq!(p.usize_list("steps"), vec![1, 2]);
    }

    #[test]
    fn integers_promote_to_floats() {
        let p = parse_params("[params]\nepsilon = 2\n", "x", &specs()).unwrap();
        assert_eq!(p.f64("epsilon"), 2.0);
    }

    #[test]
    fn rejections() {
        let dup = parse_params("[params]\nepsilon = 0.1\nepsilon = 0.2\n", "x", &specs());
        assert!(matches!(dup, Err(CliError::Parse(ref m)) if m.contains("line 3")), "{dup:?}");
        let domain = parse_params("[params]\nepsilon = -1\n", "x", &specs());
        assert!(matches!(domain, Err(CliError::Domain { ref key, .. }) if key == "epsilon"));
        assert!(matches!(parse_params("[params]\nfoo = 1\n", "x", &specs()), Err(CliError::UnknownKey { .. })));
        assert!(matches!(parse_params("seed = 1\n", "x", &specs()), Err(CliError::UnknownKey { .. })));
        assert!(matches!(parse_params("[params]\nsteps = [1.5]\n", "x", &specs()), Err(CliError::Type { .. })));
        assert!(matches!(parse_params("experiment = \"y\"\n", "x", &specs()), Err(CliError::ExperimentMismatch { .. })));
    }

    #[test]
    fn normalized_round_trip() {
        let p = parse_params("[params]\nepsilon = 0.25\n", "x", &specs()).unwrap();
        let text = normalized_toml("x", &p);
        assert_eq!(parse_params(&text, "x", &specs()).unwrap(), p);
    }
}
