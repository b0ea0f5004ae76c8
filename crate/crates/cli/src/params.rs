//! Parameter resolution: `key=value` config lines overlaid by command-line flags.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::str::FromStr;

/// Keys accepted by every subcommand.
pub const GLOBAL_KEYS: [&str; 8] = ["seed", "samples", "grid", "out", "format", "budget", "threads", "config"];

/// Merged raw parameters plus the diagnostics collected while reading them.
#[derive(Debug, Default)]
pub struct Params {
    values: BTreeMap<String, String>,
    used: BTreeSet<String>,
    diagnostics: Vec<String>,
}

/// Parses `key = value` lines; `#` starts a comment. Malformed lines are
/// reported and skipped.
pub fn parse_config(text: &str) -> (BTreeMap<String, String>, Vec<String>) {
    let mut out = BTreeMap::new();
    let mut errors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() => {
                out.insert(normalize(k), v.trim().to_string());
            }
            _ => errors.push(format!("config line {}: expected key=value, got `{line}`", i + 1)),
        }
    }
    (out, errors)
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-").to_ascii_lowercase()
}

impl Params {
    /// `flags` override `config`.
    pub fn new(config: BTreeMap<String, String>, flags: BTreeMap<String, String>) -> Self {
        let mut values = config;
        values.extend(flags.into_iter().map(|(k, v)| (normalize(&k), v)));
        Params { values, used: BTreeSet::new(), diagnostics: Vec::new() }
    }

    pub fn diagnose(&mut self, msg: impl Into<String>) {
        self.diagnostics.push(msg.into());
    }

    pub fn require(&mut self, ok: bool, msg: impl Into<String>) {
        if !ok {
            self.diagnose(msg);
        }
    }

    fn raw(&mut self, key: &str) -> Option<String> {
        self.used.insert(key.to_string());
        self.values.get(key).cloned()
    }

    pub fn is_set(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn opt<T: FromStr>(&mut self, key: &str) -> Option<T>
    where
        T::Err: Display,
    {
        let raw = self.raw(key)?;
        match raw.parse() {
            Ok(v) => Some(v),
            Err(e) => {
                self.diagnose(format!("--{key}: cannot parse `{raw}`: {e}"));
                None
            }
        }
    }

    pub fn get<T: FromStr>(&mut self, key: &str, default: T) -> T
    where
        T::Err: Display,
    {
        self.opt(key).unwrap_or(default)
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&mut self, key: &str, default: Vec<T>) -> Vec<T>
    where
        T::Err: Display,
    {
        let Some(raw) = self.raw(key) else { return default };
        let mut out = Vec::new();
        for part in raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match part.parse() {
                Ok(v) => out.push(v),
                Err(e) => self.diagnose(format!("--{key}: cannot parse `{part}`: {e}")),
            }
        }
        out
    }

    /// A real given as a decimal or as `a/b`.
    pub fn real(&mut self, key: &str, default: f64) -> f64 {
        let Some(raw) = self.raw(key) else { return default };
        match parse_real(&raw) {
            Some(v) => v,
            None => {
                self.diagnose(format!("--{key}: cannot parse `{raw}` as a number"));
                default
            }
        }
    }

    /// The seed, recorded as missing when absent.
    pub fn seed(&mut self, stochastic: bool) -> u64 {
        match self.opt::<u64>("seed") {
            Some(s) => s,
            None => {
                if stochastic && !self.is_set("seed") {
                    self.diagnose("--seed is required for stochastic subcommands");
                }
                0
            }
        }
    }

    /// Power-of-two grid size.
    pub fn grid(&mut self, default: usize) -> usize {
        let g = self.get("grid", default);
        self.require(g >= 2 && g.is_power_of_two(), format!("--grid must be a power of two >= 2, got {g}"));
        g
    }

    pub fn samples(&mut self, default: usize) -> usize {
        let s = self.get("samples", default);
        self.require(s > 0, "--samples must be positive");
        s
    }

    /// A copy holding only the global keys, for composite subcommands.
    pub fn globals(&mut self) -> Params {
        let values = self
            .values
            .iter()
            .filter(|(k, _)| GLOBAL_KEYS.contains(&k.as_str()))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        self.used.extend(GLOBAL_KEYS.iter().map(|k| k.to_string()));
        Params { values, used: BTreeSet::new(), diagnostics: Vec::new() }
    }

    /// Takes over the diagnostics of a [`Params::globals`] copy.
    pub fn absorb(&mut self, sub: Params) {
        for d in sub.finish() {
            if !self.diagnostics.contains(&d) {
                self.diagnostics.push(d);
            }
        }
    }

    /// Flags every supplied key that nothing consumed.
    pub fn finish(mut self) -> Vec<String> {
        let unknown: Vec<String> = self
            .values
            .keys()
            .filter(|k| !self.used.contains(*k) && !GLOBAL_KEYS.contains(&k.as_str()))
            .cloned()
            .collect();
        for k in unknown {
            self.diagnostics.push(format!("unknown parameter `{k}` for this subcommand"));
        }
        self.diagnostics
    }
}

pub fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let (a, b): (f64, f64) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
        return (b != 0.0).then_some(a / b);
    }
    s.parse().ok()
}
