//! Truncated cones `dr² + (c r)² dφ²` on `r₀ < r < R`, `c = 1 − α/2π`.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::foliation::{burgers_foliation_bound, verify_main_theorem, ChainOptions, FoliationLoop, Relation};
use crate::framed::{burgers_intrinsic, burgers_vector};
use crate::geometry::meshgen::graded_annulus;
use crate::geometry::{ConeMetric, ConeSurface, CurveInChart, ElementRule, FCDomainMesh, ImmersedChart, MetricField};
use crate::numerics::V2;
use crate::poisson::{dual_sup_property_check, l1mc_norm, linfty_report, solve_floating_potential, PoissonProblem};
use crate::report::{attempt, timed, Check, Params, RunConfig, ScenarioOutput, Series};
use crate::tolerances::{scaled, BURGERS_ANALYTIC, COAREA, FLUX, INEQ};

#[derive(Debug, Clone, Copy)]
pub struct ConeSpec {
    pub alpha: f64,
    pub r0: f64,
    pub big_r: f64,
    /// Radial cells at the coarsest level.
    pub nr: usize,
}

impl Default for ConeSpec {
    fn default() -> Self {
        Self { alpha: PI / 2.0, r0: 0.05, big_r: 1.0, nr: 16 }
    }
}

impl ConeSpec {
    pub const KEYS: [&'static str; 4] = ["alpha", "r0", "R", "nr"];

    pub fn from_params(p: &Params) -> Result<Self> {
        p.restrict(&Self::KEYS)?;
        let d = Self::default();
        let s = Self { alpha: p.f64("alpha", d.alpha)?, r0: p.f64("r0", d.r0)?, big_r: p.f64("R", d.big_r)?, nr: p.usize("nr", d.nr)? };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r0 > 0.0) {
            return Err(Error::Config(format!("r0 must be positive, got {}", self.r0)));
        }
        if !(self.big_r > self.r0) {
            return Err(Error::Config(format!("R must exceed r0, got R = {}", self.big_r)));
        }
        if !(self.c() > 0.0) || !self.alpha.is_finite() {
            return Err(Error::Config(format!("alpha must be below 2π, got {}", self.alpha)));
        }
        if self.nr < 2 {
            return Err(Error::Config("nr must be at least 2".into()));
        }
        Ok(())
    }

    pub fn c(&self) -> f64 {
        1.0 - self.alpha / (2.0 * PI)
    }

    pub fn log_ratio(&self) -> f64 {
        (self.big_r / self.r0).ln()
    }

    /// `u_K(r) = −(α / 2πc) log(r/R)`.
    pub fn potential(&self, r: f64) -> f64 {
        -self.alpha / (2.0 * PI * self.c()) * (r / self.big_r).ln()
    }

    /// `‖K‖²_{H⁻¹_MC} = α² / (2πc) · log(R/r₀)`.
    pub fn dual_norm_sq(&self) -> f64 {
        self.alpha * self.alpha / (2.0 * PI * self.c()) * self.log_ratio()
    }

    /// `|B| = 2r|sin πc|` on the circle of radius `r`.
    pub fn burgers_magnitude(&self, r: f64) -> f64 {
        2.0 * r * (PI * self.c()).sin().abs()
    }

    /// Curvature lower bound `(4π − |α|)|α| / (2π − α) · log(R/r₀)`.
    pub fn curvature_bound(&self) -> f64 {
        let a = self.alpha.abs();
        if a == 0.0 {
            return 0.0;
        }
        (4.0 * PI - a) * a / (2.0 * PI - self.alpha) * self.log_ratio()
    }

    /// Burgers lower bound `4 sin²(α/2) / (2π − α)³ · log(R/r₀)`.
    pub fn burgers_bound(&self) -> f64 {
        4.0 * (self.alpha / 2.0).sin().powi(2) / (2.0 * PI - self.alpha).powi(3) * self.log_ratio()
    }

    pub fn mesh(&self, level: usize) -> Result<FCDomainMesh> {
        graded_annulus(self.r0, self.big_r, self.nr << level)
    }
}

pub struct ConeBuild {
    pub mesh: Arc<FCDomainMesh>,
    pub metric: MetricField,
    /// The standard embedded cone, for `0 < α < 2π`.
    pub embedded: Option<ImmersedChart>,
}

pub fn build_cone(spec: &ConeSpec, level: usize) -> Result<ConeBuild> {
    spec.validate()?;
    let mesh = Arc::new(spec.mesh(level)?);
    let metric = MetricField::analytic(ConeMetric::from_deficit(spec.alpha), mesh.vertices())?;
    let embedded = if spec.alpha > 0.0 {
        Some(ImmersedChart::from_surface(mesh.clone(), ConeSurface { c: spec.c() }, ElementRule::Barycenter)?)
    } else {
        None
    };
    Ok(ConeBuild { mesh, metric, embedded })
}

pub fn cone_problem(spec: &ConeSpec, b: &ConeBuild) -> Result<PoissonProblem> {
    let src = vec![0.0; b.mesh.num_elements()];
    PoissonProblem::new(b.mesh.clone(), b.metric.clone(), src, vec![spec.alpha])
}

/// Radii used for loop-level checks.
pub fn test_radii(spec: &ConeSpec) -> [f64; 3] {
    [2.0 * spec.r0, (spec.r0 * spec.big_r).sqrt(), 0.9 * spec.big_r]
}

/// Refinement study of the floating potential against the closed form.
pub fn convergence(spec: &ConeSpec, levels: usize, out: &mut ScenarioOutput) -> Result<()> {
    let exact = spec.dual_norm_sq();
    let mut table = Series::new("cone_convergence", &["level", "h", "vertices", "dual_norm_sq", "rel_error", "u_max_error", "flux"]);
    let mut errs = Vec::new();
    for level in 0..levels {
        let b = build_cone(spec, level)?;
        let p = cone_problem(spec, &b)?;
        let s = solve_floating_potential(&p)?;
        let u_err = b
            .mesh
            .vertices()
            .iter()
            .zip(&s.u)
            .map(|(v, u)| (u - spec.potential(v.norm())).abs())
            .fold(0.0, f64::max);
        let rel = if exact == 0.0 { s.energy.abs() } else { (s.energy - exact).abs() / exact };
        let h = b.mesh.max_edge();
        table.push(vec![level as f64, h, b.mesh.num_vertices() as f64, s.energy, rel, u_err, s.flux[0]]);
        errs.push((h, u_err));
        out.checks.push(Check::close_abs(
            &format!("flux through the hole, level {level}"),
            "floating potential flux condition",
            s.flux[0],
            spec.alpha,
            scaled(FLUX) * spec.alpha.abs().max(1e-300),
        ));
        if level + 1 == levels {
            out.checks.push(Check::close("dual norm squared at the finest level", "cone H^-1 norm closed form", s.energy, exact, 1e-2));
            out.checks.push(Check::close("L1_MC norm equals |alpha|", "cone L1 norm", l1mc_norm(&p), spec.alpha.abs(), 1e-12));
            let li = linfty_report(&s);
            out.checks.push(
                Check::le("sup of u over the L1-type proxy", "sup-norm estimate", li.ratio, f64::INFINITY, 0.0)
                    .info()
                    .with_detail(format!("|u|_inf = {:.6e}, proxy = {:.6e}", li.u_max, li.bound_proxy)),
            );
            out.checks.push(Check::close(
                "|u|_inf against the closed-form potential",
                "cone potential closed form",
                li.u_max,
                spec.potential(spec.r0).abs(),
                2e-2,
            ));
            out.checks.extend(dual_sup_checks(&s, 0x5eed)?);
        }
    }
    if exact != 0.0 {
        let monotone = errs.windows(2).all(|w| w[1].1 < w[0].1);
        out.checks.push(Check::flag("potential error decreases under refinement", "cone potential closed form", monotone));
        if errs.len() >= 2 {
            let (a, b) = (errs[errs.len() - 2], errs[errs.len() - 1]);
            let order = (a.1 / b.1).ln() / (a.0 / b.0).ln();
            out.checks.push(Check::ge("observed convergence order of the potential", "cone potential closed form", order, 1.0, 0.0));
        }
    }
    out.series.push(table);
    Ok(())
}

/// Maximiser property of `u_K` against random admissible trials.
pub fn dual_sup_checks(s: &crate::poisson::PotentialSolution, seed: u64) -> Result<Vec<Check>> {
    let m = s.problem.mesh();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let interior: Vec<usize> = (0..m.num_vertices()).filter(|&v| m.boundary_of(v).is_none()).collect();
    let mut trials = vec![s.u.clone(), s.u.iter().map(|x| 2.5 * x).collect()];
    for _ in 0..8 {
        let mut phi = vec![0.0; m.num_vertices()];
        for _ in 0..20 {
            phi[interior[rng.gen_range(0..interior.len())]] += rng.gen_range(-1.0..1.0);
        }
        trials.push(phi);
    }
    let r = dual_sup_property_check(s, &trials)?;
    let worst = r.trials.iter().map(|t| t.ratio).fold(f64::NEG_INFINITY, f64::max);
    Ok(vec![
        Check::le("pairing bounded by dual norm times trial norm", "dual norm as a supremum", worst, 1.0, scaled(INEQ)),
        Check::close("maximiser attains the dual norm", "dual norm as a supremum", r.trials[0].ratio, 1.0, 1e-8),
        Check::close("ratio invariant under scaling", "dual norm as a supremum", r.trials[1].ratio, r.trials[0].ratio, 1e-10),
    ])
}

/// Intrinsic and (when embedded) extrinsic Burgers vectors on circles.
pub fn burgers_checks(spec: &ConeSpec, b: &ConeBuild) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let tol = scaled(BURGERS_ANALYTIC);
    for r in test_radii(spec) {
        let curve = CurveInChart::circle(V2::zeros(), r, 1024);
        let exact = spec.burgers_magnitude(r);
        let intr = burgers_intrinsic(&b.metric, &curve)?;
        out.push(Check::close(&format!("intrinsic |B| at r = {r:.4}"), "cone Burgers vector", intr.magnitude, exact, tol));
        if let Some(chart) = &b.embedded {
            let lp = chart.framed_loop(&curve)?;
            let br = burgers_vector(&lp, 0)?;
            out.push(Check::close(&format!("primal |B| at r = {r:.4}"), "cone Burgers vector", br.magnitude, exact, tol));
            let dual = br.dual.map(|d| (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()).unwrap_or(f64::NAN);
            out.push(Check::close(&format!("dual-route |B| at r = {r:.4}"), "Burgers vector dual formula", dual, exact, tol));
        }
    }
    Ok(out)
}

/// Energy bounds, the full chain and the Burgers foliation bound on the
/// embedded cone.
pub fn embedded_checks(spec: &ConeSpec, b: &ConeBuild) -> Result<Vec<Check>> {
    let Some(chart) = &b.embedded else { return Ok(Vec::new()) };
    let mut out = Vec::new();
    let energy = chart.bending_energy();
    out.push(Check::ge("bending energy above the curvature bound", "cone curvature lower bound", energy, spec.curvature_bound(), scaled(INEQ)));
    out.push(Check::ge("bending energy above the Burgers bound", "cone Burgers lower bound", energy, spec.burgers_bound(), scaled(INEQ)));

    let hole = CurveInChart::circle(V2::zeros(), 2.0 * spec.r0, 512);
    out.push(Check::flag("hole loop is extendable", "extendability", chart.framed_loop(&hole)?.is_extendable()?));
    let report = verify_main_theorem(chart, &[hole], ChainOptions::default())?;
    out.push(Check::close("enclosed curvature of the hole", "curvature hidden in a hole", report.hole_charges[0], spec.alpha, 1e-6));
    for s in &report.steps {
        let c = match s.relation {
            Relation::Ge => Check::ge(&format!("chain: {}", s.label), "curvature bound proof chain", s.lhs, s.rhs, scaled(INEQ)),
            Relation::Eq => Check::close(&format!("chain: {}", s.label), "curvature bound proof chain", s.lhs, s.rhs, scaled(COAREA)),
        };
        out.push(c);
    }
    out.push(Check::ge("chain: bending energy above the FEM bound", "curvature lower bound", report.lhs, report.rhs, scaled(INEQ)));
    out.push(Check::close("FEM bound against the closed form", "cone curvature lower bound", report.rhs, spec.curvature_bound(), 1e-2));
    out.push(Check::le("largest leaf flux residual", "leaf flux identity", report.max_leaf_flux_residual, scaled(FLUX) * report.l1, 0.0));

    let n = 64;
    let loops: Vec<FoliationLoop> = (0..n)
        .map(|k| {
            let r = spec.r0 * (spec.big_r / spec.r0).powf(k as f64 / (n - 1) as f64);
            FoliationLoop { param: r, curve: CurveInChart::circle(V2::zeros(), r, 256) }
        })
        .collect();
    let fb = burgers_foliation_bound(chart, &loops)?;
    out.push(Check::ge("Burgers foliation bound against the closed form", "cone Burgers foliation bound", fb.bound, spec.burgers_bound(), 1e-6));
    out.push(Check::ge("bending energy above the Burgers foliation bound", "cone Burgers foliation bound", energy, fb.bound, scaled(INEQ)));
    Ok(out)
}

/// Increase of the FEM curvature bound when `R/r₀` doubles.
pub fn doubling_check(spec: &ConeSpec) -> Result<Vec<Check>> {
    if spec.alpha == 0.0 {
        return Ok(Vec::new());
    }
    let rhs = |ratio: f64| -> Result<f64> {
        let s = ConeSpec { big_r: spec.r0 * ratio, ..*spec };
        let b = build_cone(&s, 2)?;
        let sol = solve_floating_potential(&cone_problem(&s, &b)?)?;
        let l1 = spec.alpha.abs();
        Ok((4.0 * PI - l1) / l1 * sol.energy)
    };
    let a = spec.alpha.abs();
    let expected = (4.0 * PI - a) * a / (2.0 * PI - spec.alpha) * 2f64.ln();
    let d = rhs(40.0)? - rhs(20.0)?;
    Ok(vec![Check::close("bound increment when R/r0 doubles", "logarithmic growth of the bound", d, expected, 2e-2)])
}

pub fn run(config: &RunConfig) -> Result<ScenarioOutput> {
    let spec = ConeSpec::from_params(&config.params)?;
    Ok(run_cone_verification(&spec, config.levels, config.timings))
}

pub fn run_cone_verification(spec: &ConeSpec, levels: usize, timings: bool) -> ScenarioOutput {
    let mut out = ScenarioOutput::default();
    let conv = timed(timings, || {
        let mut o = ScenarioOutput::default();
        match convergence(spec, levels, &mut o) {
            Ok(()) => {
                out.series.extend(o.series);
                o.checks
            }
            Err(e) => vec![Check::failed("cone refinement study", "cone H^-1 norm closed form", &e)],
        }
    });
    out.extend(conv);
    let finest = levels.saturating_sub(1);
    match build_cone(spec, finest) {
        Ok(b) => {
            out.extend(timed(timings, || attempt("cone Burgers vectors", "cone Burgers vector", || burgers_checks(spec, &b))));
            out.extend(timed(timings, || attempt("embedded cone bounds", "cone curvature lower bound", || embedded_checks(spec, &b))));
        }
        Err(e) => out.checks.push(Check::failed("cone construction", "cone metric", &e)),
    }
    out.extend(timed(timings, || attempt("bound growth", "logarithmic growth of the bound", || doubling_check(spec))));
    out
}
