//! Checks, reports, run configuration and output files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};

/// One named check: `lhs` against `rhs` with a margin that is non-negative
/// exactly when the check holds.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub holds: bool,
    /// Informational checks never fail a run.
    pub informational: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

impl Check {
    fn base(name: &str, anchor: &str, lhs: f64, rhs: f64, margin: f64, holds: bool) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            lhs,
            rhs,
            margin,
            holds,
            informational: false,
            detail: None,
            runtime_ms: None,
        }
    }

    /// `lhs ≥ rhs` with relative slack `tol`.
    pub fn ge(name: &str, anchor: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        let margin = lhs - rhs + tol * rhs.abs();
        Self::base(name, anchor, lhs, rhs, margin, margin >= 0.0)
    }

    /// `lhs ≥ rhs − slack`.
    pub fn ge_abs(name: &str, anchor: &str, lhs: f64, rhs: f64, slack: f64) -> Self {
        let margin = lhs - rhs + slack;
        Self::base(name, anchor, lhs, rhs, margin, margin >= 0.0)
    }

    /// `lhs ≤ rhs` with relative slack `tol`.
    pub fn le(name: &str, anchor: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        let margin = rhs - lhs + tol * rhs.abs();
        Self::base(name, anchor, lhs, rhs, margin, margin >= 0.0)
    }

    /// `|value − expected| ≤ tol·|expected|` (absolute when `expected` is 0).
    pub fn close(name: &str, anchor: &str, value: f64, expected: f64, tol: f64) -> Self {
        let scale = if expected == 0.0 { 1.0 } else { expected.abs() };
        let margin = tol * scale - (value - expected).abs();
        Self::base(name, anchor, value, expected, margin, margin >= 0.0)
    }

    /// `|value − expected| ≤ tol`.
    pub fn close_abs(name: &str, anchor: &str, value: f64, expected: f64, tol: f64) -> Self {
        let margin = tol - (value - expected).abs();
        Self::base(name, anchor, value, expected, margin, margin >= 0.0)
    }

    pub fn flag(name: &str, anchor: &str, holds: bool) -> Self {
        let v = if holds { 1.0 } else { 0.0 };
        Self::base(name, anchor, v, 1.0, v - 1.0, holds)
    }

    pub fn failed(name: &str, anchor: &str, err: &Error) -> Self {
        Self::base(name, anchor, f64::NAN, f64::NAN, f64::NAN, false).with_detail(err.to_string())
    }

    pub fn info(mut self) -> Self {
        self.informational = true;
        self
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    pub fn passes(&self) -> bool {
        self.holds || self.informational
    }
}

/// Runs `f`, turning an error into a single failed check named `name`.
pub fn attempt(name: &str, anchor: &str, f: impl FnOnce() -> Result<Vec<Check>>) -> Vec<Check> {
    match f() {
        Ok(c) => c,
        Err(e) => vec![Check::failed(name, anchor, &e)],
    }
}

/// A table for plotting.
#[derive(Debug, Clone, Serialize)]
pub struct Series {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|x| format!("{x:e}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ScenarioOutput {
    pub checks: Vec<Check>,
    pub series: Vec<Series>,
}

impl ScenarioOutput {
    pub fn extend(&mut self, c: Vec<Check>) {
        self.checks.extend(c);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(Check::passes)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passes())
    }
}

/// `--param k=v` values with typed access.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Params(pub BTreeMap<String, String>);

impl Params {
    pub fn parse<'a>(pairs: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let mut m = BTreeMap::new();
        for p in pairs {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("parameter {p:?} is not of the form key=value")))?;
            m.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self(m))
    }

    pub fn with(mut self, k: &str, v: impl ToString) -> Self {
        self.0.insert(k.into(), v.to_string());
        self
    }

    /// Fails on keys outside `allowed`.
    pub fn restrict(&self, allowed: &[&str]) -> Result<()> {
        match self.0.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::Config(format!("unknown parameter {k:?}; expected one of {allowed:?}"))),
            None => Ok(()),
        }
    }

    /// Numbers, or expressions `a*pi`, `pi/b`, `a*pi/b`.
    pub fn f64(&self, k: &str, default: f64) -> Result<f64> {
        match self.0.get(k) {
            None => Ok(default),
            Some(v) => parse_number(v).ok_or_else(|| Error::Config(format!("parameter {k}={v:?} is not a number"))),
        }
    }

    pub fn usize(&self, k: &str, default: usize) -> Result<usize> {
        match self.0.get(k) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| Error::Config(format!("parameter {k}={v:?} is not a count"))),
        }
    }

    pub fn list(&self, k: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.0.get(k) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|x| parse_number(x).ok_or_else(|| Error::Config(format!("parameter {k}: {x:?} is not a number"))))
                .collect(),
        }
    }
}

fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim().replace(' ', "");
    if let Ok(x) = s.parse::<f64>() {
        return Some(x);
    }
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.to_string(), b.parse::<f64>().ok()?),
        None => (s.clone(), 1.0),
    };
    let num = match num.as_str() {
        "pi" => std::f64::consts::PI,
        "-pi" => -std::f64::consts::PI,
        n => n.strip_suffix("*pi")?.parse::<f64>().ok()? * std::f64::consts::PI,
    };
    Some(num / den)
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub scenario: String,
    pub params: Params,
    pub levels: usize,
    pub seed: u64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub jobs: usize,
    pub tol_scale: f64,
    #[serde(skip)]
    pub timings: bool,
}

impl RunConfig {
    pub fn new(scenario: &str) -> Self {
        Self {
            scenario: scenario.into(),
            params: Params::default(),
            levels: 3,
            seed: 0,
            out: None,
            jobs: 1,
            tol_scale: crate::tolerances::scale(),
            timings: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels == 0 {
            return Err(Error::Config("--levels must be at least 1".into()));
        }
        if self.jobs == 0 {
            return Err(Error::Config("--jobs must be at least 1".into()));
        }
        if !(self.tol_scale > 0.0) {
            return Err(Error::Config("tolerance scale must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Environment {
    pub crate_version: &'static str,
    pub os: &'static str,
    pub arch: &'static str,
}

impl Default for Environment {
    fn default() -> Self {
        Self { crate_version: env!("CARGO_PKG_VERSION"), os: std::env::consts::OS, arch: std::env::consts::ARCH }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub series: Vec<Series>,
    pub environment: Environment,
    pub config: RunConfig,
}

impl VerificationReport {
    pub fn new(config: RunConfig, out: ScenarioOutput) -> Self {
        Self {
            scenario: config.scenario.clone(),
            passed: out.all_pass(),
            checks: out.checks,
            series: out.series,
            environment: Environment::default(),
            config,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes `report.json` and one CSV per series into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.to_json()?)?;
        for s in &self.series {
            std::fs::write(dir.join(format!("{}.csv", s.name)), s.to_csv())?;
        }
        Ok(())
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let tag = match (c.holds, c.informational) {
                (true, _) => "ok  ",
                (false, true) => "info",
                (false, false) => "FAIL",
            };
            s.push_str(&format!("[{tag}] {:<52} lhs={:<13.6e} rhs={:<13.6e} ({})", c.name, c.lhs, c.rhs, c.anchor));
            if let Some(ms) = c.runtime_ms {
                s.push_str(&format!(" {ms:.1} ms"));
            }
            if let Some(d) = &c.detail {
                s.push_str(&format!("\n       {d}"));
            }
            s.push('\n');
        }
        s.push_str(&format!("{}: {}\n", self.scenario, if self.passed { "PASS" } else { "FAIL" }));
        s
    }
}

/// Times `f` and stamps the runtime on the checks it returns when `on`.
pub fn timed(on: bool, f: impl FnOnce() -> Vec<Check>) -> Vec<Check> {
    let t = Instant::now();
    let mut c = f();
    if on {
        let ms = t.elapsed().as_secs_f64() * 1e3;
        for x in c.iter_mut() {
            x.runtime_ms = Some(ms);
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pi_expressions() {
        assert_eq!(parse_number("0.5"), Some(0.5));
        assert_eq!(parse_number("pi/2"), Some(std::f64::consts::FRAC_PI_2));
        assert_eq!(parse_number("-2*pi"), Some(-2.0 * std::f64::consts::PI));
        assert_eq!(parse_number("x"), None);
    }

    #[test]
    fn check_margins() {
        assert!(Check::ge("a", "b", 1.0, 1.0005, 1e-3).holds);
        assert!(!Check::ge("a", "b", 1.0, 1.01, 1e-3).holds);
        assert!(Check::close("a", "b", 1.001, 1.0, 1e-2).holds);
        let p = Params::parse(["a=1", "b=pi"]).unwrap();
        assert!(p.restrict(&["a"]).is_err());
        assert!(Params::parse(["nope"]).is_err());
    }
}
