//! Graph immersions `(x, y, √ε u)` over the unit disc: the linear
//! isoperimetric inequality for `D²u`, the expansion orders of the curvature
//! and boundary densities in ε, and the degree/winding identity on the
//! Gauss images of graph patches.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::meshgen::disc;
use crate::geometry::{surface_jet, CurveInChart, ElementRule, Graph, ImmersedChart, PointGeometry, Polynomial};
use crate::numerics::{gauss_legendre, linear_fit, V2, V3};
use crate::report::{attempt, timed, Check, Params, RunConfig, ScenarioOutput, Series};
use crate::sphere::{check_degree_winding_relation, check_disc_chain, AreaRule, GaussImage};
use crate::tolerances::{scaled, INEQ};

const N_BOUNDARY: usize = 1024;
const N_R: usize = 32;
const N_PHI: usize = 128;
const ORDER_TOL: f64 = 0.25;

#[derive(Debug, Clone)]
pub struct GraphSpec {
    /// Extra height functions given on the command line.
    pub extra: Vec<Polynomial>,
    /// Random cubic polynomials added to the bowl and the saddle.
    pub n_random: usize,
    pub epsilons: Vec<f64>,
    pub pairs_per_patch: usize,
    /// Rings of the disc mesh used for Gauss images.
    pub rings: usize,
}

impl Default for GraphSpec {
    fn default() -> Self {
        Self { extra: Vec::new(), n_random: 3, epsilons: vec![1e-1, 1e-2, 1e-3, 1e-4], pairs_per_patch: 24, rings: 12 }
    }
}

impl GraphSpec {
    pub const KEYS: [&'static str; 5] = ["u", "n_random", "epsilon", "pairs", "rings"];

    pub fn from_params(p: &Params) -> Result<Self> {
        p.restrict(&Self::KEYS)?;
        let d = Self::default();
        let extra = match p.0.get("u") {
            Some(src) => src.split(';').map(Polynomial::parse).collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        let s = Self {
            extra,
            n_random: p.usize("n_random", d.n_random)?,
            epsilons: p.list("epsilon", &d.epsilons)?,
            pairs_per_patch: p.usize("pairs", d.pairs_per_patch)?,
            rings: p.usize("rings", d.rings)?,
        };
        if s.epsilons.len() < 2 || s.epsilons.iter().any(|e| !(*e > 0.0 && *e <= 1.0)) {
            return Err(Error::Config("epsilon needs at least two values in (0, 1]".into()));
        }
        if s.rings < 2 {
            return Err(Error::Config("rings must be at least 2".into()));
        }
        Ok(s)
    }
}

/// Cubic with random coefficients in `[-1, 1]` on the monomials of degree 2 and 3.
pub fn random_cubic(rng: &mut ChaCha8Rng) -> Polynomial {
    let mut terms = Vec::new();
    for deg in 2..=3u32 {
        for i in 0..=deg {
            terms.push((i, deg - i, rng.gen_range(-1.0..1.0)));
        }
    }
    Polynomial { terms }
}

/// The bowl, the saddle, the random cubics and any extras, with labels.
pub fn test_functions(spec: &GraphSpec, seed: u64) -> Vec<(String, Polynomial)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![("bowl".to_string(), Polynomial::bowl()), ("saddle".to_string(), Polynomial::saddle())];
    for k in 0..spec.n_random {
        out.push((format!("random cubic {}", k + 1), random_cubic(&mut rng)));
    }
    for (k, p) in spec.extra.iter().enumerate() {
        out.push((format!("u{}", k + 1), p.clone()));
    }
    out
}

fn frobenius(h: [f64; 3]) -> f64 {
    (h[0] * h[0] + 2.0 * h[1] * h[1] + h[2] * h[2]).sqrt()
}

fn polar_nodes() -> Vec<(V2, f64)> {
    let mut out = Vec::with_capacity(N_R * N_PHI);
    for (r, w) in gauss_legendre(N_R, 0.0, 1.0) {
        for j in 0..N_PHI {
            let t = TAU * (j as f64 + 0.5) / N_PHI as f64;
            out.push((V2::new(r * t.cos(), r * t.sin()), w * r * TAU / N_PHI as f64));
        }
    }
    out
}

fn boundary_nodes() -> impl Iterator<Item = (V2, V2)> {
    (0..N_BOUNDARY).map(|j| {
        let t = TAU * j as f64 / N_BOUNDARY as f64;
        (V2::new(t.cos(), t.sin()), V2::new(-t.sin(), t.cos()))
    })
}

/// Both sides of `(∫_{∂D}|D²u| ds)² ≥ 4π|∫_D det D²u dx|`.
pub fn olbermann_sides(u: &Polynomial) -> (f64, f64) {
    let ds = TAU / N_BOUNDARY as f64;
    let bdry: f64 = boundary_nodes().map(|(p, _)| frobenius(u.hessian(p.x, p.y)) * ds).sum();
    let det: f64 = polar_nodes()
        .iter()
        .map(|(p, w)| {
            let h = u.hessian(p.x, p.y);
            (h[0] * h[2] - h[1] * h[1]) * w
        })
        .sum();
    (bdry * bdry, 4.0 * PI * det.abs())
}

/// Residuals of the first-order expansions at scale ε:
/// `∫|K_ε √det g_ε − ε det D²u| dx` and `∫_{∂D}| |dN_ε|_g |γ'|_g − √ε |D²u| | ds`,
/// plus the total curvature and boundary turning of the graph.
#[derive(Debug, Clone, Copy)]
pub struct Expansion {
    pub epsilon: f64,
    pub area_residual: f64,
    pub boundary_residual: f64,
    pub total_curvature: f64,
    pub turning: f64,
}

pub fn expansion(u: &Polynomial, epsilon: f64) -> Result<Expansion> {
    let surface = Graph { height: u.clone(), scale: epsilon.sqrt() };
    let geom = |p: V2| PointGeometry::from_jet(&surface_jet(&surface, p)).ok_or_else(|| Error::DegenerateConfiguration(format!("graph is singular at {p:?}")));
    let (mut area_residual, mut total_curvature) = (0.0, 0.0);
    for (p, w) in polar_nodes() {
        let g = geom(p)?;
        let h = u.hessian(p.x, p.y);
        let density = g.k_extrinsic * g.sqrt_det;
        area_residual += (density - epsilon * (h[0] * h[2] - h[1] * h[1])).abs() * w;
        total_curvature += density * w;
    }
    let ds = TAU / N_BOUNDARY as f64;
    let (mut boundary_residual, mut turning) = (0.0, 0.0);
    for (p, v) in boundary_nodes() {
        let g = geom(p)?;
        let speed = (v.transpose() * g.g * v)[0].sqrt();
        let density = g.dn_sq.max(0.0).sqrt() * speed;
        boundary_residual += (density - epsilon.sqrt() * frobenius(u.hessian(p.x, p.y))).abs() * ds;
        turning += density * ds;
    }
    Ok(Expansion { epsilon, area_residual, boundary_residual, total_curvature, turning })
}

fn olbermann_checks(index: usize, label: &str, u: &Polynomial, spec: &GraphSpec, table: &mut Series) -> Result<Vec<Check>> {
    let tag = |s: &str| format!("{s}, {label}");
    let mut out = Vec::new();
    let (lhs, rhs) = olbermann_sides(u);
    out.push(Check::ge(&tag("linearised isoperimetric inequality"), "linearised isoperimetric inequality", lhs, rhs, scaled(INEQ)).with_detail(format!("u = {u}")));
    if label == "bowl" || label == "saddle" {
        // |D²u| = √2 on the circle and det D²u = ±1
        out.push(Check::close(&tag("boundary Hessian integral squared"), "linearised isoperimetric inequality", lhs, 8.0 * PI * PI, 1e-10));
        out.push(Check::close(&tag("Hessian determinant integral"), "linearised isoperimetric inequality", rhs, 4.0 * PI * PI, 1e-10));
    }

    let mut xs = Vec::new();
    let (mut area, mut bdry) = (Vec::new(), Vec::new());
    for &eps in &spec.epsilons {
        let e = expansion(u, eps)?;
        let k = e.total_curvature.abs();
        out.push(Check::ge(
            &tag(&format!("nonlinear isoperimetric inequality at epsilon = {eps:e}")),
            "isoperimetric inequality for the Gauss image",
            e.turning * e.turning,
            (4.0 * PI - k) * k,
            scaled(INEQ),
        ));
        table.push(vec![index as f64, eps, e.area_residual, e.boundary_residual, e.total_curvature, e.turning]);
        xs.push(eps.ln());
        area.push(e.area_residual);
        bdry.push(e.boundary_residual);
    }
    for (what, ys, expected) in [("curvature density", &area, 2.0), ("boundary density", &bdry, 1.5)] {
        if ys.iter().any(|y| !(*y > 0.0)) {
            out.push(Check::flag(&tag(&format!("{what} expansion order")), "power expansion in epsilon", false).with_detail("vanishing residual; order undefined"));
            continue;
        }
        let logs: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
        let (slope, _) = linear_fit(&xs, &logs);
        out.push(Check::close_abs(&tag(&format!("{what} expansion order")), "power expansion in epsilon", slope, expected, ORDER_TOL * scaled(1.0)));
    }
    Ok(out)
}

pub fn graph_chart(u: &Polynomial, rings: usize) -> Result<ImmersedChart> {
    ImmersedChart::from_surface(Arc::new(disc(1.0, rings)?), Graph { height: u.clone(), scale: 1.0 }, ElementRule::Barycenter)
}

fn uniform_point(rng: &mut ChaCha8Rng) -> V3 {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let t: f64 = rng.gen_range(0.0..TAU);
    let s = (1.0 - z * z).sqrt();
    V3::new(s * t.cos(), s * t.sin(), z)
}

/// A point of the triangulated Gauss image.
fn image_point(rng: &mut ChaCha8Rng, normals: &[V3], tris: &[[usize; 3]]) -> V3 {
    let t = tris[rng.gen_range(0..tris.len())];
    let (mut a, mut b): (f64, f64) = (rng.gen(), rng.gen());
    if a + b > 1.0 {
        (a, b) = (1.0 - a, 1.0 - b);
    }
    (normals[t[0]] * (1.0 - a - b) + normals[t[1]] * a + normals[t[2]] * b).normalize()
}

/// Outcome of the degree/winding identity on random pairs of one patch.
#[derive(Debug, Clone, Copy, Default)]
pub struct PairStats {
    pub tested: usize,
    pub failures: usize,
    /// Pairs with `Q(p) ≠ Q(q)`.
    pub nontrivial: usize,
    pub resampled: usize,
}

/// Random regular pairs: `p` from the Gauss image, `q` from the image or the
/// whole sphere; irregular or antipodal draws are redrawn.
pub fn degree_winding_pairs(chart: &ImmersedChart, pairs: usize, rng: &mut ChaCha8Rng) -> Result<PairStats> {
    let image = GaussImage::from_chart(chart)?;
    let normals = chart.vertex_normals();
    let tris = chart.mesh().triangles();
    let mut st = PairStats::default();
    while st.tested < pairs {
        if st.resampled > 50 * pairs {
            return Err(Error::DegenerateConfiguration("too many irregular draws".into()));
        }
        let p = image_point(rng, &normals, tris);
        let q = if rng.gen_bool(0.5) { image_point(rng, &normals, tris) } else { uniform_point(rng) };
        match check_degree_winding_relation(&image, &p, &q) {
            Ok(ok) => {
                st.tested += 1;
                if !ok {
                    st.failures += 1;
                }
                if image.degree_at(&p)? != image.degree_at(&q)? {
                    st.nontrivial += 1;
                }
            }
            Err(Error::NotRegularValue | Error::DegenerateConfiguration(_)) => st.resampled += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(st)
}

fn patch_checks(label: &str, u: &Polynomial, spec: &GraphSpec, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let chart = graph_chart(u, spec.rings)?;
    let st = degree_winding_pairs(&chart, spec.pairs_per_patch, rng)?;
    let mut out = vec![Check::close_abs(&format!("degree/winding identity, {label}"), "degree and winding number", st.failures as f64, 0.0, 0.0)
        .with_detail(format!("{} pairs, {} with distinct degrees, {} redrawn", st.tested, st.nontrivial, st.resampled))];

    let boundary = CurveInChart::circle(V2::zeros(), 1.0, 512);
    let ch = check_disc_chain(&chart, &boundary, AreaRule::Polar { radius: 1.0, n_r: 96, n_phi: 384 })?;
    let tol = scaled(INEQ);
    out.push(Check::ge(&format!("degree-weighted curvature bounds the total curvature, {label}"), "degree-weighted curvature", ch.degree_weighted, ch.total_curvature.abs(), tol));
    out.push(Check::ge(&format!("boundary image isoperimetric inequality, {label}"), "isoperimetric inequality for the Gauss image", ch.isoperimetric_lhs, ch.isoperimetric_rhs, tol));
    out.push(Check::ge(&format!("combined disc bound, {label}"), "isoperimetric inequality for the Gauss image", ch.isoperimetric_lhs, ch.combined_rhs, tol));
    Ok(out)
}

pub fn run(config: &RunConfig) -> Result<ScenarioOutput> {
    let spec = GraphSpec::from_params(&config.params)?;
    let funcs = test_functions(&spec, config.seed);
    let mut out = ScenarioOutput::default();
    let mut table = Series::new("graph_expansion", &["function", "epsilon", "area_residual", "boundary_residual", "total_curvature", "turning"]);
    for (k, (label, u)) in funcs.iter().enumerate() {
        out.extend(timed(config.timings, || attempt(&format!("linearisation, {label}"), "linearised isoperimetric inequality", || olbermann_checks(k, label, u, &spec, &mut table))));
    }
    out.series.push(table);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x67_7261_7068);
    for (label, u) in &funcs {
        out.extend(timed(config.timings, || attempt(&format!("graph patch, {label}"), "degree and winding number", || patch_checks(label, u, &spec, &mut rng))));
    }
    Ok(out)
}
