//! Curvature dipoles: the flat metric `dr² + (r + (ε/π)cos φ)² dφ²` on an
//! annulus, its Burgers vector, candidate isometric immersions, the scaling
//! of the improved leaf bound, and the two-hole `±α` charge configuration.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::foliation::{burgers_foliation_bound, FoliationLoop};
use crate::framed::{burgers_intrinsic, burgers_vector};
use crate::geometry::meshgen::{graded_annulus, two_hole_disc};
use crate::geometry::{enclosed_curvature_intrinsic, CurveInChart, DipoleMetric, DipoleWrap, ElementRule, FCDomainMesh, ImmersedChart, MetricField};
use crate::numerics::{gauss_legendre, linear_fit, V2};
use crate::poisson::{solve_floating_potential, PoissonProblem};
use crate::report::{attempt, timed, Check, Params, RunConfig, ScenarioOutput, Series};
use crate::tolerances::{scaled, BURGERS_ANALYTIC, CURV_ANALYTIC, FLUX, GAUSS_BONNET, INEQ};

#[derive(Debug, Clone)]
pub struct DipoleSpec {
    pub epsilon: f64,
    pub r0: f64,
    pub big_r: f64,
    /// Radial cells of the annulus mesh.
    pub nr: usize,
    /// Outer-to-inner radius ratios for the scaling studies.
    pub ratios: Vec<f64>,
    /// Wrapping numbers of the candidate immersions.
    pub wraps: Vec<u32>,
}

impl Default for DipoleSpec {
    fn default() -> Self {
        Self { epsilon: 0.02, r0: 0.05, big_r: 1.0, nr: 16, ratios: vec![10.0, 20.0, 40.0], wraps: vec![1, 2, 3] }
    }
}

impl DipoleSpec {
    pub const KEYS: [&'static str; 6] = ["epsilon", "r0", "R", "nr", "ratios", "wraps"];

    pub fn from_params(p: &Params) -> Result<Self> {
        p.restrict(&Self::KEYS)?;
        let d = Self::default();
        let wraps = p
            .list("wraps", &d.wraps.iter().map(|&k| k as f64).collect::<Vec<_>>())?
            .into_iter()
            .map(|k| if k >= 1.0 && k.fract() == 0.0 { Ok(k as u32) } else { Err(Error::Config(format!("wraps must be positive integers, got {k}"))) })
            .collect::<Result<Vec<_>>>()?;
        let s = Self {
            epsilon: p.f64("epsilon", d.epsilon)?,
            r0: p.f64("r0", d.r0)?,
            big_r: p.f64("R", d.big_r)?,
            nr: p.usize("nr", d.nr)?,
            ratios: p.list("ratios", &d.ratios)?,
            wraps,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r0 > 0.0 && self.big_r > 2.0 * self.r0) {
            return Err(Error::Config(format!("need 0 < 2 r0 < R, got r0 = {}, R = {}", self.r0, self.big_r)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon < self.r0) {
            return Err(Error::Config(format!("epsilon must lie in [0, r0), got {}", self.epsilon)));
        }
        if self.nr < 2 {
            return Err(Error::Config("nr must be at least 2".into()));
        }
        if self.ratios.len() < 2 || self.ratios.iter().any(|r| !(*r > 2.0)) {
            return Err(Error::Config("ratios needs at least two values above 2".into()));
        }
        Ok(())
    }

    /// Opening angle of each cone of the `±α` pair with Burgers magnitude ε.
    pub fn alpha(&self) -> f64 {
        2.0 * (self.epsilon / (2.0 * self.r0)).asin()
    }

    /// `(1/64π³)(ε²/r₀²)`.
    pub fn improved_slope(&self) -> f64 {
        self.epsilon * self.epsilon / (self.r0 * self.r0) / (64.0 * PI.powi(3))
    }

    pub fn test_radii(&self) -> [f64; 3] {
        [2.0 * self.r0, 0.5 * self.big_r, 0.9 * self.big_r]
    }
}

pub struct DipoleBuild {
    pub mesh: Arc<FCDomainMesh>,
    pub metric: MetricField,
}

pub fn build_dipole(spec: &DipoleSpec) -> Result<DipoleBuild> {
    spec.validate()?;
    let mesh = Arc::new(graded_annulus(spec.r0, spec.big_r, spec.nr)?);
    let metric = MetricField::analytic(DipoleMetric { epsilon: spec.epsilon }, mesh.vertices())?;
    Ok(DipoleBuild { mesh, metric })
}

/// Candidate isometric immersion wrapped `k` times around a thin cylinder.
pub fn dipole_candidate(spec: &DipoleSpec, mesh: Arc<FCDomainMesh>, k: u32) -> Result<ImmersedChart> {
    ImmersedChart::from_surface(mesh, DipoleWrap { epsilon: spec.epsilon, k }, ElementRule::Barycenter)
}

/// Samples needed to resolve a constant-r loop of the `k`-fold wrap: about
/// 32 per turn around the cylinder.
pub fn wrap_samples(spec: &DipoleSpec, k: u32, r: f64) -> usize {
    let turns = TAU * (r + spec.epsilon / PI) * k as f64 / spec.epsilon.max(1e-300);
    ((32.0 * turns).ceil() as usize).max(1024).next_power_of_two()
}

fn circle(r: f64) -> CurveInChart {
    CurveInChart::circle(V2::zeros(), r, 1024)
}

pub fn intrinsic_checks(spec: &DipoleSpec, b: &DipoleBuild) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let tol = scaled(BURGERS_ANALYTIC);
    let mut mags = Vec::new();
    for r in spec.test_radii() {
        let c = circle(r);
        let m = burgers_intrinsic(&b.metric, &c)?.magnitude;
        mags.push(m);
        out.push(Check::close(&format!("intrinsic |B| at r = {r:.4}"), "dipole Burgers vector", m, spec.epsilon, tol));
        out.push(Check::close(&format!("perimeter of the constant-r loop at r = {r:.4}"), "dipole perimeter", c.length(&b.metric), TAU * r, 1e-9));
    }
    let spread = mags.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - mags.iter().cloned().fold(f64::INFINITY, f64::min);
    out.push(Check::close_abs("|B| is independent of r", "dipole Burgers vector", spread, 0.0, tol * spec.epsilon.max(1e-300)));

    let worst = b.mesh.vertices().iter().map(|&p| b.metric.gaussian_curvature(p).abs() * p.norm_squared()).fold(0.0, f64::max);
    out.push(Check::close_abs("metric is flat (r²|K|)", "dipole metric is flat", worst, 0.0, scaled(CURV_ANALYTIC)));

    let [a, m, _] = spec.test_radii();
    let k1 = enclosed_curvature_intrinsic(&b.metric, &b.mesh, 1, &circle(a))?;
    let k2 = enclosed_curvature_intrinsic(&b.metric, &b.mesh, 1, &circle(m))?;
    out.push(Check::close_abs("enclosed curvature vanishes", "net curvature of a dipole", k1, 0.0, scaled(GAUSS_BONNET)));
    out.push(Check::close_abs("enclosed curvature independent of the loop", "curvature hidden in a hole", k1 - k2, 0.0, scaled(GAUSS_BONNET)));
    Ok(out)
}

/// `∫_σ |dN|_g dℓ` along a chart curve.
fn full_turning(chart: &ImmersedChart, metric: &MetricField, curve: &CurveInChart) -> Result<f64> {
    let dphi = TAU / curve.len() as f64;
    curve
        .points()
        .iter()
        .zip(curve.velocity())
        .map(|(p, v)| {
            let g = chart.point_geometry(*p).ok_or_else(|| Error::DegenerateConfiguration(format!("no geometry at {p:?}")))?;
            Ok(g.dn_sq.max(0.0).sqrt() * metric.norm_sq(*p, v).sqrt() * dphi)
        })
        .sum()
}

/// Per-leaf bounds on candidate immersions wrapped `k` times.
pub fn candidate_checks(spec: &DipoleSpec, b: &DipoleBuild, k: u32) -> Result<Vec<Check>> {
    let chart = dipole_candidate(spec, b.mesh.clone(), k)?;
    let tag = |s: &str| format!("{s}, wrap {k}");
    let mut out = Vec::new();
    let worst = b
        .mesh
        .vertices()
        .iter()
        .map(|&p| (chart.metric().eval(p) - b.metric.eval(p)).abs().max())
        .fold(0.0, f64::max);
    out.push(Check::close_abs(&tag("candidate is isometric"), "dipole metric", worst, 0.0, scaled(CURV_ANALYTIC)));
    let improved = spec.epsilon / spec.r0 / (4.0 * 2f64.sqrt() * PI);
    for r in spec.test_radii() {
        let c = CurveInChart::circle(V2::zeros(), r, wrap_samples(spec, k, r));
        let lp = chart.framed_loop(&c)?;
        let br = burgers_vector(&lp, 0)?;
        out.push(Check::close(&tag(&format!("primal |B| at r = {r:.4}")), "dipole Burgers vector", br.magnitude, spec.epsilon, scaled(BURGERS_ANALYTIC)));
        out.push(Check::ge(&tag(&format!("naive leaf bound at r = {r:.4}")), "per-leaf Burgers bound", lp.normal_turning(), spec.epsilon / (TAU * r), scaled(INEQ)));
        out.push(Check::ge(&tag(&format!("improved leaf bound at r = {r:.4}")), "improved leaf bound on developable surfaces", full_turning(&chart, &b.metric, &c)?, improved, scaled(INEQ)));
    }
    let n = 24;
    let loops: Vec<FoliationLoop> = (0..n)
        .map(|j| {
            let r = 2.0 * spec.r0 * (spec.big_r / (2.0 * spec.r0)).powf(j as f64 / (n - 1) as f64);
            FoliationLoop { param: r, curve: CurveInChart::circle(V2::zeros(), r, wrap_samples(spec, k, r)) }
        })
        .collect();
    let fb = burgers_foliation_bound(&chart, &loops)?;
    out.push(Check::ge(&tag("bending energy above the Burgers foliation bound"), "Burgers foliation bound", fb.energy, fb.bound, scaled(INEQ)));
    out.push(Check::ge(&tag("bending energy above the dipole bound"), "dipole lower bound", fb.energy, spec.improved_slope() * (spec.big_r / (2.0 * spec.r0)).ln(), scaled(INEQ)));
    Ok(out)
}

/// Foliation bound `∫ m(r)² / L(r) dr` over `2r₀ < r < R` for a leaf bound
/// `m` and measured perimeters `L`.
fn leaf_integral(metric: &MetricField, r_from: f64, r_to: f64, m: impl Fn(f64) -> f64) -> f64 {
    gauss_legendre(24, r_from.ln(), r_to.ln())
        .into_iter()
        .map(|(t, w)| {
            let r = t.exp();
            let l = CurveInChart::circle(V2::zeros(), r, 256).length(metric);
            w * r * m(r).powi(2) / l
        })
        .sum()
}

/// Growth of the naive and improved foliation bounds with `R/r₀`.
pub fn scaling_checks(spec: &DipoleSpec, out: &mut ScenarioOutput) -> Result<()> {
    let mut table = Series::new("dipole_scaling", &["ratio", "log_ratio", "improved_bound", "naive_bound", "h_minus_one_sq"]);
    let (mut xs, mut improved, mut naive) = (Vec::new(), Vec::new(), Vec::new());
    for &ratio in &spec.ratios {
        let s = DipoleSpec { big_r: spec.r0 * ratio, ..spec.clone() };
        let metric = MetricField::analytic(DipoleMetric { epsilon: s.epsilon }, &[V2::new(s.r0, 0.0), V2::new(s.big_r, 0.0)])?;
        let inner = circle(2.0 * s.r0);
        let b0 = burgers_intrinsic(&metric, &inner)?.magnitude;
        let l0 = inner.length(&metric);
        // leaf estimate transported outward from the innermost admissible loop
        let m0 = FRAC_1_SQRT_2 * b0 / l0;
        let imp = leaf_integral(&metric, 2.0 * s.r0, s.big_r, |_| m0);
        let nv = leaf_integral(&metric, 2.0 * s.r0, s.big_r, |r| b0 / (TAU * r));
        xs.push(ratio.ln());
        improved.push(imp);
        naive.push(nv);
        table.push(vec![ratio, ratio.ln(), imp, nv, f64::NAN]);
    }
    let (slope, icpt) = linear_fit(&xs, &improved);
    let affine = xs.iter().zip(&improved).map(|(x, y)| (y - slope * x - icpt).abs()).fold(0.0, f64::max);
    let expected = spec.improved_slope();
    out.checks.push(Check::close("slope of the improved bound in log(R/r0)", "optimal dipole lower bound", slope, expected, 0.25));
    out.checks.push(Check::close_abs("improved bound is affine in log(R/r0)", "optimal dipole lower bound", affine, 0.0, 1e-6 * expected.max(1e-300)));
    let last = naive.len() - 1;
    out.checks.push(
        Check::le("naive bound saturates as R/r0 grows", "naive dipole bound does not diverge", naive[last] / naive[last - 1], 1.0 + 0.05, 0.0)
            .with_detail(format!("naive bounds {naive:?}")),
    );

    let alpha = spec.alpha();
    let mut norms = Vec::new();
    for (row, &ratio) in table.rows.iter_mut().zip(&spec.ratios) {
        let mesh = Arc::new(two_hole_disc(ratio * spec.r0, 0.5 * spec.r0, 0.2 * spec.r0, 48)?);
        let metric = MetricField::euclidean();
        let p = PoissonProblem::new(mesh.clone(), metric, vec![0.0; mesh.num_elements()], vec![alpha, -alpha])?;
        let s = solve_floating_potential(&p)?;
        for (i, q) in [alpha, -alpha].into_iter().enumerate() {
            out.checks.push(Check::close_abs(
                &format!("flux through hole {}, R/r0 = {ratio}", i + 1),
                "floating potential flux condition",
                s.flux[i],
                q,
                scaled(FLUX) * alpha.abs().max(1e-300),
            ));
        }
        row[4] = s.energy;
        norms.push(s.energy.sqrt());
    }
    if alpha > 0.0 {
        let (lo, hi) = norms.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        out.checks.push(
            Check::le("two-hole H^-1 norm varies by less than 10%", "dipole H^-1 norm does not diverge", hi / lo - 1.0, 0.1, 0.0)
                .with_detail(format!("norms {norms:?}")),
        );
        let n = norms.len();
        out.checks.push(Check::le("H^-1 norm ratio between the two largest domains", "dipole H^-1 norm does not diverge", norms[n - 1] / norms[n - 2], 1.1, 0.0));
    }
    out.series.push(table);
    Ok(())
}

pub fn run(config: &RunConfig) -> Result<ScenarioOutput> {
    let spec = DipoleSpec::from_params(&config.params)?;
    Ok(run_dipole_verification(&spec, config.timings))
}

pub fn run_dipole_verification(spec: &DipoleSpec, timings: bool) -> ScenarioOutput {
    let mut out = ScenarioOutput::default();
    match build_dipole(spec) {
        Ok(b) => {
            out.extend(timed(timings, || attempt("dipole metric", "dipole Burgers vector", || intrinsic_checks(spec, &b))));
            if spec.epsilon > 0.0 {
                for &k in &spec.wraps {
                    out.extend(timed(timings, || attempt(&format!("dipole candidate, wrap {k}"), "per-leaf Burgers bound", || candidate_checks(spec, &b, k))));
                }
            }
        }
        Err(e) => out.checks.push(Check::failed("dipole construction", "dipole metric", &e)),
    }
    let scaling = timed(timings, || {
        let mut o = ScenarioOutput::default();
        match scaling_checks(spec, &mut o) {
            Ok(()) => {
                out.series.extend(o.series);
                o.checks
            }
            Err(e) => vec![Check::failed("dipole scaling study", "optimal dipole lower bound", &e)],
        }
    });
    out.extend(scaling);
    out
}
