//! Spherical caps: the equality case of the loop isoperimetric inequality,
//! the disc chain and the pushforward identity; plus the Weiner equality on
//! single and doubled equators.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI, TAU};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::framed::{check_iso_inequality, FramedLoop, IsoCase};
use crate::geometry::meshgen::disc;
use crate::geometry::{CurveInChart, ElementRule, ImmersedChart, Sphere};
use crate::numerics::{V2, V3};
use crate::report::{attempt, timed, Check, Params, RunConfig, ScenarioOutput, Series};
use crate::sphere::{check_disc_chain, pushforward_identity_check, weiner_check, AreaRule, SphereCurve, SphereTest};
use crate::tolerances::{scaled, GAUSS_BONNET};

const EQUALITY: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct CapSpec {
    pub thetas: Vec<f64>,
    pub rho: f64,
    /// Boundary samples.
    pub n: usize,
    pub n_mc: usize,
}

impl Default for CapSpec {
    fn default() -> Self {
        Self { thetas: vec![FRAC_PI_6, FRAC_PI_4, FRAC_PI_3, FRAC_PI_2], rho: 1.0, n: 1024, n_mc: 100_000 }
    }
}

impl CapSpec {
    pub const KEYS: [&'static str; 4] = ["theta0", "rho", "n", "n_mc"];

    pub fn from_params(p: &Params) -> Result<Self> {
        p.restrict(&Self::KEYS)?;
        let d = Self::default();
        let s = Self {
            thetas: p.list("theta0", &d.thetas)?,
            rho: p.f64("rho", d.rho)?,
            n: p.usize("n", d.n)?,
            n_mc: p.usize("n_mc", d.n_mc)?,
        };
        if let Some(t) = s.thetas.iter().find(|t| !(**t > 0.0 && **t <= FRAC_PI_2)) {
            return Err(Error::Config(format!("theta0 must lie in (0, π/2], got {t}")));
        }
        if !(s.rho > 0.0) || s.n < 16 || s.n_mc == 0 {
            return Err(Error::Config("need rho > 0, n ≥ 16 and n_mc ≥ 1".into()));
        }
        Ok(s)
    }
}

/// Boundary of the cap of colatitude `theta0` on the sphere of radius `rho`,
/// framed by the outward sphere normal.
pub fn cap_loop(n: usize, theta0: f64, rho: f64) -> Result<FramedLoop> {
    let (s, c) = theta0.sin_cos();
    let normal: Vec<V3> = (0..n)
        .map(|k| {
            let t = TAU * k as f64 / n as f64;
            V3::new(s * t.cos(), s * t.sin(), c)
        })
        .collect();
    FramedLoop::new(normal.iter().map(|v| v * rho).collect(), normal)
}

pub fn cap_chart(theta0: f64, rho: f64, rings: usize) -> Result<ImmersedChart> {
    let mesh = Arc::new(disc(theta0, rings)?);
    ImmersedChart::from_surface(mesh, Sphere { radius: rho }, ElementRule::Barycenter)
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn cap_checks(theta0: f64, spec: &CapSpec, table: &mut Series) -> Result<Vec<Check>> {
    let tag = |s: &str| format!("{s}, theta0 = {theta0:.4}");
    let mut out = Vec::new();
    let l1 = TAU * (1.0 - theta0.cos());

    let lp = cap_loop(spec.n, theta0, spec.rho)?;
    let iso = check_iso_inequality(&lp)?;
    out.push(Check::flag(&tag("cap boundary frame is extendable"), "extendability", iso.case == IsoCase::Extendable));
    out.push(Check::close(&tag("loop isoperimetric equality"), "isoperimetric equality on caps", iso.lhs, iso.rhs, EQUALITY));
    out.push(Check::close(&tag("total geodesic curvature"), "cap geodesic curvature", lp.total_geodesic_curvature(), TAU * theta0.cos(), EQUALITY));

    let chart = cap_chart(theta0, spec.rho, 8)?;
    let bdry = CurveInChart::circle(V2::zeros(), theta0, spec.n);
    let clp = chart.framed_loop(&bdry)?;
    let ciso = check_iso_inequality(&clp)?;
    out.push(Check::close(&tag("loop isoperimetric equality on the chart"), "isoperimetric equality on caps", ciso.lhs, ciso.rhs, EQUALITY));

    let (kg, _) = chart.geodesic_curvature(&bdry)?;
    let cot = theta0.cos() / theta0.sin() / spec.rho;
    let worst = kg.iter().map(|k| (k - cot).abs()).fold(0.0, f64::max);
    out.push(Check::close_abs(&tag("pointwise geodesic curvature"), "cap geodesic curvature", worst, 0.0, EQUALITY * (1.0 + cot.abs())));
    out.push(Check::close_abs(&tag("Gauss-Bonnet residual"), "Gauss-Bonnet", chart.gauss_bonnet_residual(&bdry)?, 0.0, scaled(GAUSS_BONNET)));

    let rule = AreaRule::Polar { radius: theta0, n_r: 24, n_phi: 64 };
    let ch = check_disc_chain(&chart, &bdry, rule)?;
    out.push(Check::close(&tag("L1 norm of the curvature"), "cap total curvature", ch.total_curvature, l1, EQUALITY));
    out.push(Check::close(&tag("degree-weighted curvature equals total curvature"), "disc chain", ch.degree_weighted, ch.total_curvature, EQUALITY));
    out.push(Check::close(&tag("spherical isoperimetric step is an equality"), "disc chain", ch.isoperimetric_lhs, ch.isoperimetric_rhs, EQUALITY));
    out.push(Check::close(&tag("combined disc bound is an equality"), "disc chain", ch.isoperimetric_lhs, ch.combined_rhs, EQUALITY));

    let coarse = CurveInChart::circle(V2::zeros(), theta0, 256);
    let push = pushforward_identity_check(&chart, &coarse, rule, &SphereTest::family(), 32)?;
    let (worst, which) = push.iter().map(|p| (p.residual, p.test)).fold((0.0, None), |a, (r, t)| if r >= a.0 { (r, Some(t)) } else { a });
    out.push(Check::close_abs(&tag("pushforward identity, worst test function"), "pushforward identity", worst, 0.0, 1e-2 * l1).with_detail(format!("{which:?}")));

    table.push(vec![theta0, iso.lhs, iso.rhs, rel_gap(iso.lhs, iso.rhs), ch.total_curvature, rel_gap(ch.isoperimetric_lhs, ch.combined_rhs), worst]);
    Ok(out)
}

fn weiner_checks(n_mc: usize, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (turns, expected, what) in [(1, 4.0 * PI * PI, "equator"), (2, 16.0 * PI * PI, "doubled equator")] {
        let r = weiner_check(&SphereCurve::equator(128, turns), n_mc, seed)?;
        out.push(
            Check::close_abs(&format!("winding-number energy of the {what}"), "spherical isoperimetric equality", r.estimate, expected, 3.0 * r.stderr)
                .with_detail(format!("stderr {:.4e}, n_mc {}", r.stderr, r.n_mc)),
        );
        out.push(Check::ge(&format!("squared length bounds the winding energy, {what}"), "spherical isoperimetric inequality", r.lhs, r.estimate - 3.0 * r.stderr, 0.0));
    }
    Ok(out)
}

pub fn run(config: &RunConfig) -> Result<ScenarioOutput> {
    let spec = CapSpec::from_params(&config.params)?;
    let mut out = ScenarioOutput::default();
    let mut table = Series::new("cap_equality", &["theta0", "iso_lhs", "iso_rhs", "iso_gap", "total_curvature", "chain_gap", "pushforward_residual"]);
    for &t in &spec.thetas {
        out.extend(timed(config.timings, || attempt(&format!("cap theta0 = {t:.4}"), "isoperimetric equality on caps", || cap_checks(t, &spec, &mut table))));
    }
    out.series.push(table);
    out.extend(timed(config.timings, || attempt("Weiner equality", "spherical isoperimetric equality", || weiner_checks(spec.n_mc, config.seed))));
    Ok(out)
}
