//! The `wbtool` command line: `verify`, `loop-check` and `solve`.
//!
//! Exit codes: 0 when every check holds, 1 when any check fails, 2 on
//! configuration, parse or IO errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::framed::{check_burgers_bound, check_iso_inequality, LoopFile};
use crate::poisson::{solve_floating_potential, ProblemFile};
use crate::report::{Check, Params, RunConfig};
use crate::scenarios::{run_all, SCENARIOS};
use crate::tolerances::{scaled, FLUX, INEQ};

#[derive(Debug, Parser)]
#[command(name = "wbtool", version, about = "Bending-energy lower bounds: scenario verification, framed-loop checks and floating-potential solves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario's check suite (cone, econe, dipole, cap, graph or all).
    Verify {
        scenario: String,
        /// Scenario parameter `key=value`; repeatable.
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
        /// Mesh refinement levels.
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for report.json and the CSV series.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for independent scenario jobs.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Record per-check runtimes (reports are then no longer reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Extendability, both loop inequalities and the Burgers vector of a
    /// framed loop stored as JSON.
    LoopCheck {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a floating-potential problem file; writes u.csv and fluxes.csv.
    Solve {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Exit code for an error: 2 for configuration, parse and IO problems (a
/// height function that is not C² counts as configuration), 1 for
/// everything else.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Parse(_) | Error::Io(_) | Error::NotC2(_) => 2,
        _ => 1,
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Output goes to `stdout`; errors to stderr.
pub fn run<I, T>(args: I, stdout: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = crate::tolerances::scale_from_env() {
        eprintln!("wbtool: {e}");
        return exit_code(&e);
    }
    let res = match cli.command {
        Command::Verify { scenario, params, levels, seed, out, jobs, timings } => {
            verify(&scenario, &params, levels, seed, out.as_deref(), jobs, timings)
        }
        Command::LoopCheck { file, out } => loop_check(&file, out.as_deref()),
        Command::Solve { file, out } => solve(&file, out.as_deref()),
    };
    match res {
        Ok((text, passed)) => {
            let _ = stdout.write_all(text.as_bytes());
            if passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("wbtool: {e}");
            exit_code(&e)
        }
    }
}

pub fn verify(
    scenario: &str,
    params: &[String],
    levels: usize,
    seed: u64,
    out: Option<&Path>,
    jobs: usize,
    timings: bool,
) -> Result<(String, bool)> {
    let params = Params::parse(params.iter().map(String::as_str))?;
    let names: Vec<&str> = if scenario == "all" {
        if !params.0.is_empty() {
            return Err(Error::Config("--param cannot be combined with `verify all`".into()));
        }
        SCENARIOS.to_vec()
    } else {
        vec![scenario]
    };
    let configs: Vec<RunConfig> = names
        .iter()
        .map(|s| {
            let mut c = RunConfig::new(s);
            c.params = params.clone();
            c.levels = levels;
            c.seed = seed;
            c.out = out.map(Path::to_path_buf);
            c.jobs = jobs;
            c.timings = timings;
            c
        })
        .collect();
    for c in &configs {
        c.validate()?;
    }
    let reports = run_all(configs, jobs)?;
    let mut text = String::new();
    for r in &reports {
        text.push_str(&r.summary());
        if let Some(dir) = out {
            let dir = if reports.len() > 1 { dir.join(&r.scenario) } else { dir.to_path_buf() };
            r.write(&dir)?;
        }
    }
    Ok((text, reports.iter().all(|r| r.passed)))
}

/// Absolute slack for sides that vanish up to round-off.
const ROUNDOFF: f64 = 1e-10;

#[derive(Debug, Serialize)]
struct LoopReport {
    file: String,
    samples: usize,
    extendable: bool,
    checks: Vec<Check>,
    burgers_vector: [f64; 3],
}

pub fn loop_check(file: &Path, out: Option<&Path>) -> Result<(String, bool)> {
    let lp = LoopFile::load(file)?.to_loop()?;
    let extendable = lp.is_extendable()?;
    let iso = check_iso_inequality(&lp)?;
    let bb = check_burgers_bound(&lp)?;
    let tol = scaled(INEQ);
    let checks = vec![
        Check::ge_abs("loop isoperimetric inequality", "framed-loop isoperimetric inequality", iso.lhs, iso.rhs, tol * iso.rhs.abs() + ROUNDOFF)
            .with_detail(format!("{:?} form", iso.case)),
        Check::close("isoperimetric equality", "isoperimetric equality on caps", iso.lhs, iso.rhs, 1e-6).info(),
        Check::ge_abs("Burgers bound", "per-loop Burgers bound", bb.lhs, bb.rhs, tol * bb.rhs.abs() + ROUNDOFF),
    ];
    let mut text = String::new();
    let _ = writeln!(text, "loop: {} ({} samples)", file.display(), lp.len());
    let _ = writeln!(text, "extendable: {extendable}");
    let _ = writeln!(text, "total geodesic curvature: {:.9e}", iso.total_geodesic_curvature);
    let _ = writeln!(text, "normal turning: {:.9e}", iso.normal_turning);
    let _ = writeln!(text, "length: {:.9e}", bb.length);
    let b = bb.burgers.vector;
    let _ = writeln!(text, "Burgers vector: ({:.9e}, {:.9e}, {:.9e}), |B| = {:.9e}", b[0], b[1], b[2], bb.burgers.magnitude);
    for c in &checks {
        let tag = match (c.holds, c.informational) {
            (true, _) => "ok  ",
            (false, true) => "info",
            (false, false) => "FAIL",
        };
        let _ = writeln!(text, "[{tag}] {:<32} lhs={:<13.6e} rhs={:<13.6e}", c.name, c.lhs, c.rhs);
    }
    let passed = checks.iter().all(Check::passes);
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        let rep = LoopReport { file: file.display().to_string(), samples: lp.len(), extendable, checks, burgers_vector: b };
        std::fs::write(dir.join("loop_report.json"), serde_json::to_string_pretty(&rep)?)?;
    }
    Ok((text, passed))
}

#[derive(Debug, Serialize)]
struct SolveReport {
    dual_norm: f64,
    energy: f64,
    hole_charges: Vec<f64>,
    flux: Vec<f64>,
    flux_gradient: Vec<f64>,
    hole_constants: Vec<f64>,
    cg_iterations: usize,
    cg_relative_residual: f64,
}

pub fn solve(file: &Path, out: Option<&Path>) -> Result<(String, bool)> {
    let problem = ProblemFile::load(file)?.to_problem()?;
    let sol = solve_floating_potential(&problem)?;
    let charges = problem.hole_charges().to_vec();
    let scale = problem.source().iter().map(|x| x.abs()).fold(0.0, f64::max).max(charges.iter().map(|x| x.abs()).fold(0.0, f64::max)).max(1e-300);
    let mut text = String::new();
    let _ = writeln!(text, "problem: {}", file.display());
    let _ = writeln!(text, "vertices: {}, elements: {}, holes: {}", problem.mesh().num_vertices(), problem.mesh().num_elements(), problem.mesh().num_holes());
    let _ = writeln!(text, "dual norm: {:.9e}", sol.dual_norm());
    let _ = writeln!(text, "cg: {} iterations, relative residual {:.3e}", sol.cg.iterations, sol.cg.relative_residual);
    let mut passed = true;
    let _ = writeln!(text, "hole  charge         flux           flux_gradient  constant");
    for i in 0..charges.len() {
        let ok = (sol.flux[i] - charges[i]).abs() <= scaled(FLUX) * scale;
        passed &= ok;
        let _ = writeln!(
            text,
            "{:<5} {:<14.6e} {:<14.6e} {:<14.6e} {:<14.6e}{}",
            i + 1,
            charges[i],
            sol.flux[i],
            sol.flux_gradient[i],
            sol.hole_constants[i],
            if ok { "" } else { " FAIL" }
        );
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        let mut u = String::from("x,y,u\n");
        for (p, v) in problem.mesh().vertices().iter().zip(&sol.u) {
            let _ = writeln!(u, "{:e},{:e},{:e}", p.x, p.y, v);
        }
        std::fs::write(dir.join("u.csv"), u)?;
        let mut f = String::from("hole,charge,flux,flux_gradient,constant\n");
        for i in 0..charges.len() {
            let _ = writeln!(f, "{},{:e},{:e},{:e},{:e}", i + 1, charges[i], sol.flux[i], sol.flux_gradient[i], sol.hole_constants[i]);
        }
        std::fs::write(dir.join("fluxes.csv"), f)?;
        let rep = SolveReport {
            dual_norm: sol.dual_norm(),
            energy: sol.energy,
            hole_charges: charges,
            flux: sol.flux.clone(),
            flux_gradient: sol.flux_gradient.clone(),
            hole_constants: sol.hole_constants.clone(),
            cg_iterations: sol.cg.iterations,
            cg_relative_residual: sol.cg.relative_residual,
        };
        std::fs::write(dir.join("solution.json"), serde_json::to_string_pretty(&rep)?)?;
    }
    Ok((text, passed))
}
