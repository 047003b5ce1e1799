//! Reproducible experiments: cones and E-cones, curvature dipoles,
//! spherical caps and graphs. Each scenario returns a list of named checks
//! and plot series; configuration errors are returned, everything else
//! becomes a failed check.

pub mod cap;
pub mod cone;
pub mod dipole;
pub mod econe;
pub mod graph;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::report::{RunConfig, ScenarioOutput, VerificationReport};

pub const SCENARIOS: [&str; 5] = ["cone", "econe", "dipole", "cap", "graph"];

pub fn run(config: &RunConfig) -> Result<ScenarioOutput> {
    config.validate()?;
    match config.scenario.as_str() {
        "cone" => cone::run(config),
        "econe" => econe::run(config),
        "dipole" => dipole::run(config),
        "cap" => cap::run(config),
        "graph" => graph::run(config),
        other => Err(Error::Config(format!("unknown scenario {other:?}; expected one of {SCENARIOS:?}"))),
    }
}

/// Runs each configuration as an independent job on a pool of `jobs`
/// threads; the reports come back in input order.
pub fn run_all(configs: Vec<RunConfig>, jobs: usize) -> Result<Vec<VerificationReport>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| {
        configs
            .into_par_iter()
            .map(|c| run(&c).map(|out| VerificationReport::new(c, out)))
            .collect()
    })
}
