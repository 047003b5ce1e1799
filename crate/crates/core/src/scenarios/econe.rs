//! E-cones: excess angle `α = −2πk`, realised with zero bending by the
//! planar `(k+1)`-fold cover. The boundary frames alternate between
//! non-extendable (odd `k`) and extendable (even `k`).

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::foliation::{verify_main_theorem, ChainOptions};
use crate::framed::{burgers_vector, check_iso_inequality, FramedLoop};
use crate::geometry::meshgen::graded_annulus;
use crate::geometry::{ConeMetric, CurveInChart, ECone, ElementRule, ImmersedChart, MetricField};
use crate::numerics::{V2, V3};
use crate::report::{attempt, timed, Check, Params, RunConfig, ScenarioOutput};
use crate::tolerances::{scaled, BURGERS_ANALYTIC, CURV_ANALYTIC, GAUSS_BONNET};

#[derive(Debug, Clone)]
pub struct EConeSpec {
    pub ks: Vec<u32>,
    pub r0: f64,
    pub big_r: f64,
    pub nr: usize,
}

impl Default for EConeSpec {
    fn default() -> Self {
        Self { ks: vec![1, 2], r0: 0.05, big_r: 1.0, nr: 8 }
    }
}

impl EConeSpec {
    pub const KEYS: [&'static str; 4] = ["k", "r0", "R", "nr"];

    pub fn from_params(p: &Params) -> Result<Self> {
        p.restrict(&Self::KEYS)?;
        let d = Self::default();
        let ks = p
            .list("k", &d.ks.iter().map(|&k| k as f64).collect::<Vec<_>>())?
            .into_iter()
            .map(|k| {
                if k >= 1.0 && k.fract() == 0.0 && k < 64.0 {
                    Ok(k as u32)
                } else {
                    Err(Error::Config(format!("k must be a positive integer, got {k}")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let s = Self { ks, r0: p.f64("r0", d.r0)?, big_r: p.f64("R", d.big_r)?, nr: p.usize("nr", d.nr)? };
        if !(s.r0 > 0.0 && s.big_r > s.r0) {
            return Err(Error::Config(format!("need 0 < r0 < R, got r0 = {}, R = {}", s.r0, s.big_r)));
        }
        if s.nr < 2 || s.ks.is_empty() {
            return Err(Error::Config("nr must be at least 2 and k non-empty".into()));
        }
        Ok(s)
    }
}

/// Zero-bending immersion of the E-cone with `α = −2πk`.
pub fn econe_chart(k: u32, r0: f64, big_r: f64, nr: usize) -> Result<ImmersedChart> {
    let mesh = Arc::new(graded_annulus(r0, big_r, nr)?);
    ImmersedChart::from_surface(mesh, ECone { m: k + 1 }, ElementRule::Barycenter)
}

/// The trivial frame: a planar circle with constant normal.
pub fn trivial_frame(n: usize) -> Result<FramedLoop> {
    let g = (0..n)
        .map(|j| {
            let t = TAU * j as f64 / n as f64;
            V3::new(t.cos(), t.sin(), 0.0)
        })
        .collect();
    FramedLoop::new(g, vec![V3::z(); n])
}

fn checks_for(k: u32, spec: &EConeSpec) -> Result<Vec<Check>> {
    let alpha = -TAU * k as f64;
    let chart = econe_chart(k, spec.r0, spec.big_r, spec.nr)?;
    let mut out = Vec::new();
    let tag = |s: &str| format!("{s}, k = {k}");

    out.push(Check::close_abs(&tag("bending energy of the cover"), "zero-bending E-cone immersion", chart.bending_energy(), 0.0, 1e-10));

    let cone = MetricField::analytic(ConeMetric::from_deficit(alpha), chart.mesh().vertices())?;
    let worst = chart
        .mesh()
        .vertices()
        .iter()
        .map(|&p| (chart.metric().eval(p) - cone.eval(p)).abs().max())
        .fold(0.0, f64::max);
    out.push(Check::close_abs(&tag("induced metric equals the cone metric"), "E-cone metric", worst, 0.0, scaled(CURV_ANALYTIC)));

    let radii = [2.0 * spec.r0, (spec.r0 * spec.big_r).sqrt()];
    let expect_ext = k.is_multiple_of(2);
    for r in radii {
        let curve = CurveInChart::circle(V2::zeros(), r, 512);
        let lp = chart.framed_loop(&curve)?;
        let ext = lp.is_extendable()?;
        out.push(
            Check::flag(&tag(&format!("extendability parity at r = {r:.4}")), "E-cone extendability parity", ext == expect_ext)
                .with_detail(format!("extendable = {ext}")),
        );
        let kg = chart.enclosed_curvature(1, &curve)?;
        out.push(Check::close(&tag(&format!("enclosed curvature at r = {r:.4}")), "curvature hidden in a hole", kg, alpha, scaled(GAUSS_BONNET)));
        let b = burgers_vector(&lp, 0)?;
        out.push(Check::close_abs(&tag(&format!("Burgers vector at r = {r:.4}")), "cone Burgers vector", b.magnitude, 0.0, scaled(BURGERS_ANALYTIC) * r));
        let iso = check_iso_inequality(&lp)?;
        out.push(Check::ge_abs(&tag(&format!("loop isoperimetric inequality at r = {r:.4}")), "framed-loop isoperimetric inequality", iso.lhs, iso.rhs, 1e-9));
    }

    let hole = CurveInChart::circle(V2::zeros(), 2.0 * spec.r0, 512);
    let opts = ChainOptions { levels: 50, ..Default::default() };
    match verify_main_theorem(&chart, std::slice::from_ref(&hole), opts) {
        Err(Error::NotExtendable(1)) => out.push(Check::flag(&tag("curvature bound rejects the non-extendable cover"), "extendability hypothesis", !expect_ext)),
        Err(e) => return Err(e),
        Ok(r) => {
            out.push(Check::flag(&tag("curvature bound accepts the extendable cover"), "extendability hypothesis", expect_ext));
            out.push(
                Check::flag(&tag("curvature bound is vacuous"), "vacuous bound for large L1 norm", r.vacuous)
                    .with_detail(format!("L1 = {:.6}, 4π = {:.6}", r.l1, 4.0 * PI)),
            );
        }
    }
    if !expect_ext {
        let r = verify_main_theorem(&chart, &[hole], ChainOptions { levels: 50, nonextendable_annulus: true, ..Default::default() })?;
        out.push(
            Check::ge(&tag("non-extendable annulus variant"), "non-extendable annulus variant", r.lhs, r.rhs, 0.0)
                .info()
                .with_detail(format!("shifted charge {:.6}, vacuous = {}", r.hole_charges[0], r.vacuous)),
        );
    }
    Ok(out)
}

pub fn run(config: &RunConfig) -> Result<ScenarioOutput> {
    let spec = EConeSpec::from_params(&config.params)?;
    let mut out = ScenarioOutput::default();
    out.extend(timed(config.timings, || {
        attempt("trivial frame", "extendability", || Ok(vec![Check::flag("trivial frame is extendable", "extendability", trivial_frame(256)?.is_extendable()?)]))
    }));
    for &k in &spec.ks {
        out.extend(timed(config.timings, || attempt(&format!("E-cone k = {k}"), "zero-bending E-cone immersion", || checks_for(k, &spec))));
    }
    Ok(out)
}
