//! Flat run configuration: `key = value` pairs grouped into a few sections.
//!
//! ```toml
//! [run]
//! experiments = ["table1-chp"]
//! out = "results"
//!
//! [solver]
//! nodes_per_side = 128
//! ```

use std::path::{Path, PathBuf};

use toml::Value;

use crate::error::{nearest, CliError};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Int,
    Float,
    Bool,
    Str,
    StrList,
}

const SCHEMA: &[(&str, &[(&str, Kind)])] = &[
    ("run", &[("experiments", Kind::StrList), ("out", Kind::Str), ("full", Kind::Bool), ("jobs", Kind::Int)]),
    ("polygon", &[("m", Kind::Int), ("b", Kind::Float), ("l", Kind::Float)]),
    ("solver", &[("nodes_per_side", Kind::Int), ("courant", Kind::Float), ("samples", Kind::Int)]),
    ("analysis", &[("n_max", Kind::Int), ("terms", Kind::Int)]),
    ("times", &[("pq", Kind::StrList)]),
];

/// Parameter overrides shared by every experiment of a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub m: Option<usize>,
    pub b: Option<f64>,
    pub l: Option<f64>,
    pub nodes_per_side: Option<usize>,
    pub courant: Option<f64>,
    pub samples: Option<usize>,
    pub n_max: Option<usize>,
    pub terms: Option<usize>,
    pub pq: Option<Vec<(u64, u64)>>,
}

impl Overrides {
    pub fn touches_polygon(&self) -> bool {
        self.m.is_some() || self.b.is_some() || self.l.is_some()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    pub experiments: Vec<String>,
    pub out: Option<PathBuf>,
    pub full: Option<bool>,
    pub jobs: Option<usize>,
    pub overrides: Overrides,
}

fn type_name(k: Kind) -> &'static str {
    match k {
        Kind::Int => "a non-negative integer",
        Kind::Float => "a number",
        Kind::Bool => "a boolean",
        Kind::Str => "a string",
        Kind::StrList => "an array of strings",
    }
}

fn check(section: &str, key: &str, v: &Value, kind: Kind) -> Result<(), CliError> {
    let ok = match kind {
        Kind::Int => v.as_integer().is_some_and(|i| i >= 0),
        Kind::Float => v.as_float().is_some() || v.as_integer().is_some(),
        Kind::Bool => v.is_bool(),
        Kind::Str => v.is_str(),
        Kind::StrList => v.as_array().is_some_and(|a| a.iter().all(Value::is_str)),
    };
    if ok {
        Ok(())
    } else {
        Err(CliError::config(format!("[{section}] {key} must be {}", type_name(kind))))
    }
}

fn parse_pq(s: &str) -> Result<(u64, u64), CliError> {
    let bad = || CliError::config(format!("[times] pq entry {s:?} is not of the form \"p/q\" with q > 0"));
    let (p, q) = s.split_once('/').ok_or_else(bad)?;
    let p: u64 = p.trim().parse().map_err(|_| bad())?;
    let q: u64 = q.trim().parse().map_err(|_| bad())?;
    if q == 0 {
        return Err(bad());
    }
    Ok((p, q))
}

pub fn parse(text: &str) -> Result<Config, CliError> {
    let doc: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::config(e.message().to_string()))?;
    let sections: Vec<&str> = SCHEMA.iter().map(|(s, _)| *s).collect();
    let mut cfg = Config::default();
    for (name, body) in &doc {
        let Some((_, keys)) = SCHEMA.iter().find(|(s, _)| s == name) else {
            return Err(CliError::config(format!("unknown section [{name}]")).with_nearest(nearest(name, &sections)));
        };
        let Some(table) = body.as_table() else {
            return Err(CliError::config(format!("{name} = ... sits outside any section; put it under a [section]")));
        };
        let names: Vec<&str> = keys.iter().map(|(k, _)| *k).collect();
        for (key, value) in table {
            let Some((_, kind)) = keys.iter().find(|(k, _)| k == key) else {
                return Err(
                    CliError::config(format!("unknown key {key} in [{name}]")).with_nearest(nearest(key, &names))
                );
            };
            if value.is_table() {
                return Err(CliError::config(format!("[{name}] {key}: nested tables are not allowed")));
            }
            check(name, key, value, *kind)?;
            let int = || value.as_integer().unwrap() as usize;
            let float = || value.as_float().unwrap_or_else(|| value.as_integer().unwrap() as f64);
            let strs = || value.as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect::<Vec<_>>();
            let o = &mut cfg.overrides;
            match (name.as_str(), key.as_str()) {
                ("run", "experiments") => cfg.experiments = strs(),
                ("run", "out") => cfg.out = Some(PathBuf::from(value.as_str().unwrap())),
                ("run", "full") => cfg.full = value.as_bool(),
                ("run", "jobs") => cfg.jobs = Some(int()),
                ("polygon", "m") => o.m = Some(int()),
                ("polygon", "b") => o.b = Some(float()),
                ("polygon", "l") => o.l = Some(float()),
                ("solver", "nodes_per_side") => o.nodes_per_side = Some(int()),
                ("solver", "courant") => o.courant = Some(float()),
                ("solver", "samples") => o.samples = Some(int()),
                ("analysis", "n_max") => o.n_max = Some(int()),
                ("analysis", "terms") => o.terms = Some(int()),
                ("times", "pq") => o.pq = Some(strs().iter().map(|s| parse_pq(s)).collect::<Result<_, _>>()?),
                _ => unreachable!("schema and dispatch disagree on [{name}] {key}"),
            }
        }
    }
    if cfg.jobs == Some(0) {
        return Err(CliError::config("[run] jobs must be at least 1"));
    }
    if cfg.overrides.nodes_per_side.is_some_and(|n| n < 4) {
        return Err(CliError::config("[solver] nodes_per_side must be at least 4"));
    }
    if cfg.overrides.samples == Some(0) {
        return Err(CliError::config("[solver] samples must be at least 1"));
    }
    Ok(cfg)
}

pub fn load(path: &Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}
