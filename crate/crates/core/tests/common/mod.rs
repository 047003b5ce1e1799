#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};
use std::path::PathBuf;
use std::sync::Arc;

use willmore::framed::{FramedLoop, LoopFile};
use willmore::geometry::meshgen::{disc, graded_annulus};
use willmore::geometry::{DipoleWrap, ElementRule, Graph, ImmersedChart, Polynomial, Surface};
use willmore::poisson::{PoissonProblem, ProblemFile};
use willmore::scenarios::graph::{test_functions, GraphSpec};
use willmore::scenarios::{cap, cone, econe};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub const LOOP_FIXTURES: [&str; 4] = ["cap_loop.json", "trivial_frame.json", "cone_loop.json", "econe_k1_loop.json"];
pub const PROBLEM_FIXTURES: [&str; 3] = ["cone_problem.json", "zero_problem.json", "two_hole_problem.json"];

pub fn fixture_loops() -> Vec<(String, FramedLoop)> {
    LOOP_FIXTURES
        .iter()
        .map(|n| (n.to_string(), LoopFile::load(fixture(n)).unwrap().to_loop().unwrap()))
        .collect()
}

pub fn fixture_problems() -> Vec<(String, PoissonProblem)> {
    PROBLEM_FIXTURES
        .iter()
        .map(|n| (n.to_string(), ProblemFile::load(&fixture(n)).unwrap().to_problem().unwrap()))
        .collect()
}

pub fn graph(u: Polynomial, rings: usize) -> ImmersedChart {
    analytic_disc(Graph { height: u, scale: 1.0 }, 1.0, rings)
}

pub fn analytic_disc<S: Surface + Clone + 'static>(s: S, radius: f64, rings: usize) -> ImmersedChart {
    ImmersedChart::from_surface(Arc::new(disc(radius, rings).unwrap()), s, ElementRule::Barycenter).unwrap()
}

/// Piecewise-linear graph of `u` on a disc mesh.
pub fn meshed_graph(u: &Polynomial, rings: usize) -> ImmersedChart {
    let mesh = Arc::new(disc(1.0, rings).unwrap());
    let analytic = graph(u.clone(), rings);
    let pos = mesh.vertices().iter().map(|p| analytic.position(*p).unwrap()).collect();
    ImmersedChart::from_positions(mesh, pos).unwrap()
}

/// Every chart the invariant suite runs on.
pub fn chart_corpus() -> Vec<(String, ImmersedChart)> {
    let mut out = Vec::new();
    let spec = cone::ConeSpec::default();
    out.push(("embedded cone".into(), cone::build_cone(&spec, 0).unwrap().embedded.unwrap()));
    for k in [1, 2] {
        out.push((format!("E-cone k = {k}"), econe::econe_chart(k, 0.05, 1.0, 8).unwrap()));
    }
    for t in [FRAC_PI_3, FRAC_PI_2] {
        out.push((format!("cap {t:.4}"), cap::cap_chart(t, 1.0, 8).unwrap()));
    }
    for (label, u) in test_functions(&GraphSpec::default(), 0) {
        out.push((format!("graph {label}"), graph(u, 12)));
    }
    out.push(("meshed bowl".into(), meshed_graph(&Polynomial::bowl(), 12)));
    let annulus = Arc::new(graded_annulus(0.05, 1.0, 8).unwrap());
    out.push((
        "dipole wrap".into(),
        ImmersedChart::from_surface(annulus, DipoleWrap { epsilon: 0.02, k: 1 }, ElementRule::Barycenter).unwrap(),
    ));
    out
}
