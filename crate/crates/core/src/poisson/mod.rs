//! Floating-potential Poisson problems on finitely connected charts and the
//! multiply-connected curvature norms derived from them.
//!
//! The outer boundary carries `u = 0`; every inner boundary is a floating
//! conductor whose nodes share one unknown and whose total flux is the hole
//! charge `K_i`.

mod io;
mod sparse;

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

pub use io::{MetricSpec, ProblemFile, SourceSpec};
pub use sparse::{conjugate_gradient, CgStats, Csr};

use crate::error::{Error, Result};
use crate::geometry::{FCDomainMesh, ImmersedChart, MetricField, Sym2};
use crate::numerics::V2;
use crate::tolerances::{scaled, CG_RESIDUAL, INEQ};

#[derive(Debug, Clone)]
struct ElementData {
    grads: [V2; 3],
    area: f64,
    ginv: Sym2,
    sqrt_det: f64,
}

impl ElementData {
    fn stiffness(&self) -> [[f64; 3]; 3] {
        let mut k = [[0.0; 3]; 3];
        let w = self.area * self.sqrt_det;
        for a in 0..3 {
            for b in 0..3 {
                k[a][b] = w * self.grads[a].dot(&(self.ginv * self.grads[b]));
            }
        }
        k
    }

    fn vol(&self) -> f64 {
        self.area * self.sqrt_det
    }
}

/// Mesh, metric, per-element curvature density `K` and hole charges `K_i`.
#[derive(Debug, Clone)]
pub struct PoissonProblem {
    mesh: Arc<FCDomainMesh>,
    metric: MetricField,
    source: Vec<f64>,
    hole_charges: Vec<f64>,
    elements: Arc<Vec<ElementData>>,
}

impl PoissonProblem {
    pub fn new(mesh: Arc<FCDomainMesh>, metric: MetricField, source: Vec<f64>, hole_charges: Vec<f64>) -> Result<Self> {
        if source.len() != mesh.num_elements() {
            return Err(Error::Config(format!(
                "source has {} values for {} elements",
                source.len(),
                mesh.num_elements()
            )));
        }
        if hole_charges.len() != mesh.num_holes() {
            return Err(Error::Config(format!(
                "{} hole charges for {} holes",
                hole_charges.len(),
                mesh.num_holes()
            )));
        }
        let elements: Result<Vec<ElementData>> = (0..mesh.num_elements())
            .into_par_iter()
            .map(|e| {
                let [a, b, c] = mesh.corners(e);
                let area = mesh.area(e);
                let perp = |v: V2| V2::new(-v.y, v.x) / (2.0 * area);
                let grads = [perp(c - b), perp(a - c), perp(b - a)];
                let bc = mesh.barycenter(e);
                let g = metric.eval(bc);
                let det = g.determinant();
                if !(det > 0.0 && g[(0, 0)] > 0.0) {
                    return Err(Error::NonSpdMetric { x: bc.x, y: bc.y });
                }
                Ok(ElementData { grads, area, ginv: g.try_inverse().unwrap(), sqrt_det: det.sqrt() })
            })
            .collect();
        Ok(Self { mesh, metric, source, hole_charges, elements: Arc::new(elements?) })
    }

    /// `K` evaluated at element barycenters by `k`.
    pub fn with_density(
        mesh: Arc<FCDomainMesh>,
        metric: MetricField,
        k: impl Fn(V2) -> f64 + Sync,
        hole_charges: Vec<f64>,
    ) -> Result<Self> {
        let source = (0..mesh.num_elements()).into_par_iter().map(|e| k(mesh.barycenter(e))).collect();
        Self::new(mesh, metric, source, hole_charges)
    }

    /// Source from the chart's per-element curvature (extrinsic `K`).
    pub fn from_chart(chart: &ImmersedChart, hole_charges: Vec<f64>) -> Result<Self> {
        Self::new(chart.mesh().clone(), chart.metric().clone(), chart.fields().k_extrinsic.clone(), hole_charges)
    }

    /// Same geometry with `(K, K_i)` multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let mut p = self.clone();
        p.source.iter_mut().for_each(|k| *k *= s);
        p.hole_charges.iter_mut().for_each(|k| *k *= s);
        p
    }

    pub fn mesh(&self) -> &Arc<FCDomainMesh> {
        &self.mesh
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn source(&self) -> &[f64] {
        &self.source
    }

    pub fn hole_charges(&self) -> &[f64] {
        &self.hole_charges
    }

    /// Riemannian area of element `e` (metric at the barycenter).
    pub fn element_volume(&self, e: usize) -> f64 {
        self.elements[e].vol()
    }

    pub fn total_volume(&self) -> f64 {
        self.elements.iter().map(ElementData::vol).sum()
    }

    /// Euclidean chart gradient of a nodal P1 function on element `e`.
    pub fn gradient(&self, e: usize, u: &[f64]) -> V2 {
        let t = self.mesh.triangle(e);
        let d = &self.elements[e];
        (0..3).map(|a| d.grads[a] * u[t[a]]).sum()
    }

    /// `|du|_g` on element `e`.
    pub fn gradient_norm(&self, e: usize, u: &[f64]) -> f64 {
        let gr = self.gradient(e, u);
        gr.dot(&(self.elements[e].ginv * gr)).max(0.0).sqrt()
    }

    /// `∫ K φ Vol_g + Σ K_i φ|_{Γ_i}`.
    pub fn pairing(&self, phi: &[f64]) -> f64 {
        let area: f64 = (0..self.mesh.num_elements())
            .map(|e| {
                let t = self.mesh.triangle(e);
                self.source[e] * self.elements[e].vol() * (phi[t[0]] + phi[t[1]] + phi[t[2]]) / 3.0
            })
            .sum();
        let holes: f64 = self
            .hole_charges
            .iter()
            .enumerate()
            .map(|(i, k)| k * phi[self.mesh.boundary_loops()[i + 1][0]])
            .sum();
        area + holes
    }

    /// Vertex-level stiffness applied to `phi`.
    pub fn apply_stiffness(&self, phi: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.mesh.num_vertices()];
        for (e, d) in self.elements.iter().enumerate() {
            let t = self.mesh.triangle(e);
            let k = d.stiffness();
            for a in 0..3 {
                out[t[a]] += (0..3).map(|b| k[a][b] * phi[t[b]]).sum::<f64>();
            }
        }
        out
    }

    /// `∫ |dφ|²_g Vol_g`.
    pub fn dirichlet_energy(&self, phi: &[f64]) -> f64 {
        self.apply_stiffness(phi).iter().zip(phi).map(|(a, b)| a * b).sum()
    }

    fn element_load(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.mesh.num_vertices()];
        for (e, d) in self.elements.iter().enumerate() {
            let share = self.source[e] * d.vol() / 3.0;
            for v in self.mesh.triangle(e) {
                out[v] += share;
            }
        }
        out
    }

    fn check_connected(&self) -> Result<()> {
        let n = self.mesh.num_vertices();
        let mut seen = vec![false; n];
        let mut queue: VecDeque<usize> = self.mesh.boundary_loops()[0].iter().copied().collect();
        for &v in &queue {
            seen[v] = true;
        }
        while let Some(v) = queue.pop_front() {
            for &w in self.mesh.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(v) => Err(Error::SingularSystem(format!("vertex {v} is not connected to the outer boundary"))),
            None => Ok(()),
        }
    }
}

/// Nodal solution of the floating-potential problem.
#[derive(Debug, Clone)]
pub struct PotentialSolution {
    pub problem: PoissonProblem,
    pub u: Vec<f64>,
    /// `c_i = u|_{Γ_i}`.
    pub hole_constants: Vec<f64>,
    /// `‖u‖²_{Ḣ¹(Ω,g)}`.
    pub energy: f64,
    /// Flux through each hole from the discrete equation (weak form).
    pub flux: Vec<f64>,
    /// Flux through each hole from element gradients on the boundary edges.
    pub flux_gradient: Vec<f64>,
    pub cg: CgStats,
}

impl PotentialSolution {
    pub fn dual_norm(&self) -> f64 {
        self.energy.max(0.0).sqrt()
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.u.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)))
    }

    pub fn max_abs(&self) -> f64 {
        self.u.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

pub fn solve_floating_potential(p: &PoissonProblem) -> Result<PotentialSolution> {
    let mesh = &p.mesh;
    let nv = mesh.num_vertices();
    if !(p.total_volume() > 0.0) {
        return Err(Error::SingularSystem("domain has zero measure".into()));
    }
    p.check_connected()?;

    // unknown numbering: free interior vertices first, then one per hole
    let mut dof: Vec<Option<usize>> = vec![None; nv];
    let mut next = 0;
    for v in 0..nv {
        if mesh.boundary_of(v).is_none() {
            dof[v] = Some(next);
            next += 1;
        }
    }
    let masters: Vec<usize> = (0..mesh.num_holes()).map(|i| next + i).collect();
    for (i, l) in mesh.boundary_loops().iter().enumerate().skip(1) {
        for &v in l {
            dof[v] = Some(masters[i - 1]);
        }
    }
    let n = next + masters.len();
    if n == 0 {
        let u = vec![0.0; nv];
        return finish(p, u, CgStats { iterations: 0, relative_residual: 0.0 });
    }

    let locals: Vec<[[f64; 3]; 3]> = p.elements.par_iter().map(ElementData::stiffness).collect();
    let mut trip = Vec::with_capacity(9 * locals.len());
    for (e, k) in locals.iter().enumerate() {
        let t = mesh.triangle(e);
        for a in 0..3 {
            for b in 0..3 {
                if let (Some(i), Some(j)) = (dof[t[a]], dof[t[b]]) {
                    trip.push((i, j, k[a][b]));
                }
            }
        }
    }
    let a = Csr::from_triplets(n, trip);
    let mut rhs = vec![0.0; n];
    for (v, l) in p.element_load().iter().enumerate() {
        if let Some(i) = dof[v] {
            rhs[i] += l;
        }
    }
    for (i, k) in p.hole_charges.iter().enumerate() {
        rhs[masters[i]] += k;
    }
    let cap = (50.0 * (n as f64).sqrt()).ceil() as usize;
    let (x, stats) = conjugate_gradient(&a, &rhs, CG_RESIDUAL, cap.max(50))?;
    let u = dof.iter().map(|d| d.map_or(0.0, |i| x[i])).collect();
    finish(p, u, stats)
}

fn finish(p: &PoissonProblem, u: Vec<f64>, cg: CgStats) -> Result<PotentialSolution> {
    let mesh = &p.mesh;
    let au = p.apply_stiffness(&u);
    let load = p.element_load();
    let energy = au.iter().zip(&u).map(|(a, b)| a * b).sum();
    let loops = mesh.boundary_loops();
    let hole_constants = loops[1..].iter().map(|l| u[l[0]]).collect();
    let flux = loops[1..]
        .iter()
        .map(|l| l.iter().map(|&v| au[v] - load[v]).sum())
        .collect();

    let mut edge_owner = HashMap::new();
    for (e, t) in mesh.triangles().iter().enumerate() {
        for k in 0..3 {
            edge_owner.insert((t[k], t[(k + 1) % 3]), e);
        }
    }
    let flux_gradient = loops[1..]
        .iter()
        .map(|l| {
            (0..l.len())
                .map(|k| {
                    let (a, b) = (l[k], l[(k + 1) % l.len()]);
                    let Some(&e) = edge_owner.get(&(a, b)) else { return 0.0 };
                    let d = mesh.vertex(b) - mesh.vertex(a);
                    // domain on the left, so the outward normal points right
                    let normal = V2::new(d.y, -d.x);
                    let el = &p.elements[e];
                    el.sqrt_det * (el.ginv * p.gradient(e, &u)).dot(&normal)
                })
                .sum()
        })
        .collect();
    Ok(PotentialSolution { problem: p.clone(), u, hole_constants, energy, flux, flux_gradient, cg })
}

/// `‖K‖_{H⁻¹_MC} = ‖u_K‖_{Ḣ¹}`.
pub fn h1mc_dual_norm(sol: &PotentialSolution) -> f64 {
    sol.dual_norm()
}

/// `‖K‖_{L¹_MC} = ∫|K| Vol_g + Σ|K_i|`.
pub fn l1mc_norm(p: &PoissonProblem) -> f64 {
    let area: f64 = (0..p.mesh.num_elements()).map(|e| p.source[e].abs() * p.element_volume(e)).sum();
    area + p.hole_charges.iter().map(|k| k.abs()).sum::<f64>()
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialCheck {
    pub pairing: f64,
    pub norm: f64,
    /// `‖K‖_{H⁻¹_MC}·‖φ‖_{Ḣ¹}`.
    pub bound: f64,
    /// `pairing / bound`; 1 exactly at the maximiser.
    pub ratio: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DualSupReport {
    pub dual_norm: f64,
    pub trials: Vec<TrialCheck>,
}

impl DualSupReport {
    pub fn all_hold(&self) -> bool {
        self.trials.iter().all(|t| t.holds)
    }
}

/// Tests `⟨K, φ⟩ ≤ ‖K‖_{H⁻¹_MC}‖φ‖_{Ḣ¹}` on admissible nodal trial functions.
pub fn dual_sup_property_check(sol: &PotentialSolution, trials: &[Vec<f64>]) -> Result<DualSupReport> {
    let p = &sol.problem;
    let loops = p.mesh.boundary_loops();
    let dual = sol.dual_norm();
    let tol = scaled(INEQ);
    let mut out = Vec::with_capacity(trials.len());
    for (j, phi) in trials.iter().enumerate() {
        if phi.len() != p.mesh.num_vertices() {
            return Err(Error::InadmissibleTrial(j));
        }
        let scale = phi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let eps = 1e-12 * scale;
        let outer_ok = loops[0].iter().all(|&v| phi[v].abs() <= eps);
        let holes_ok = loops[1..].iter().all(|l| l.iter().all(|&v| (phi[v] - phi[l[0]]).abs() <= eps));
        let norm = p.dirichlet_energy(phi).max(0.0).sqrt();
        if !outer_ok || !holes_ok || scale == 0.0 || norm == 0.0 {
            return Err(Error::InadmissibleTrial(j));
        }
        let pairing = p.pairing(phi);
        let bound = dual * norm;
        let ratio = if bound > 0.0 { pairing / bound } else { 0.0 };
        out.push(TrialCheck { pairing, norm, bound, ratio, holds: pairing <= bound * (1.0 + tol) + 1e-14 });
    }
    Ok(DualSupReport { dual_norm: dual, trials: out })
}

#[derive(Debug, Clone, Serialize)]
pub struct LinftyReport {
    pub u_max: f64,
    /// `‖K‖_{L²(Vol_g)} + Σ|K_i|`.
    pub bound_proxy: f64,
    pub ratio: f64,
}

pub fn linfty_report(sol: &PotentialSolution) -> LinftyReport {
    let p = &sol.problem;
    let l2: f64 = (0..p.mesh.num_elements())
        .map(|e| p.source[e].powi(2) * p.element_volume(e))
        .sum::<f64>()
        .sqrt();
    let proxy = l2 + p.hole_charges.iter().map(|k| k.abs()).sum::<f64>();
    let u_max = sol.max_abs();
    LinftyReport { u_max, bound_proxy: proxy, ratio: if proxy > 0.0 { u_max / proxy } else { 0.0 } }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::meshgen::{graded_annulus, two_hole_disc};
    use crate::geometry::ConeMetric;
    use std::f64::consts::PI;

    fn flat_annulus(nr: usize, charge: f64) -> PoissonProblem {
        let m = Arc::new(graded_annulus(0.1, 1.0, nr).unwrap());
        let src = vec![0.0; m.num_elements()];
        PoissonProblem::new(m, MetricField::euclidean(), src, vec![charge]).unwrap()
    }

    #[test]
    fn zero_data_gives_zero() {
        let s = solve_floating_potential(&flat_annulus(8, 0.0)).unwrap();
        assert!(s.u.iter().all(|x| *x == 0.0));
        assert_eq!(h1mc_dual_norm(&s), 0.0);
        assert_eq!(l1mc_norm(&s.problem), 0.0);
        assert_eq!(linfty_report(&s).ratio, 0.0);
    }

    #[test]
    fn flat_annulus_log_potential() {
        let s = solve_floating_potential(&flat_annulus(24, 1.0)).unwrap();
        let exact = (10f64).ln() / (2.0 * PI);
        assert!((s.energy - exact).abs() / exact < 5e-3, "{} vs {}", s.energy, exact);
        assert!((s.flux[0] - 1.0).abs() < 1e-6);
        assert!((s.flux_gradient[0] - 1.0).abs() < 0.1, "{:?}", s.flux_gradient);
        let m = s.problem.mesh();
        for v in 0..m.num_vertices() {
            let r = m.vertex(v).norm();
            assert!((s.u[v] + r.ln() / (2.0 * PI)).abs() < 5e-3);
        }
    }

    #[test]
    fn cone_dual_norm() {
        let alpha = PI / 2.0;
        let m = Arc::new(graded_annulus(0.05, 1.0, 24).unwrap());
        let metric = MetricField::analytic(ConeMetric::from_deficit(alpha), m.vertices()).unwrap();
        let src = vec![0.0; m.num_elements()];
        let p = PoissonProblem::new(m, metric, src, vec![alpha]).unwrap();
        let s = solve_floating_potential(&p).unwrap();
        let c = 0.75;
        let exact = alpha * alpha / (2.0 * PI * c) * 20f64.ln();
        assert!((s.energy - exact).abs() / exact < 1e-2, "{} vs {}", s.energy, exact);
        assert!((l1mc_norm(&p) - alpha).abs() < 1e-12);
    }

    #[test]
    fn dual_sup_property() {
        let s = solve_floating_potential(&flat_annulus(12, 1.0)).unwrap();
        let mut trials = vec![s.u.clone(), s.u.iter().map(|x| 3.0 * x).collect()];
        let m = s.problem.mesh().clone();
        // bump supported away from the boundary
        trials.push((0..m.num_vertices()).map(|v| if m.boundary_of(v).is_none() { m.vertex(v).x.powi(2) } else { 0.0 }).collect());
        let r = dual_sup_property_check(&s, &trials).unwrap();
        assert!(r.all_hold());
        assert!((r.trials[0].ratio - 1.0).abs() < 1e-8);
        assert!((r.trials[1].ratio - 1.0).abs() < 1e-8);
        let mut bad = s.u.clone();
        bad[m.boundary_loops()[0][0]] = 1.0;
        assert!(matches!(dual_sup_property_check(&s, &[bad]), Err(Error::InadmissibleTrial(0))));
    }

    #[test]
    fn two_hole_fluxes_and_homogeneity() {
        let m = Arc::new(two_hole_disc(1.0, 0.3, 0.08, 24).unwrap());
        let src = vec![0.0; m.num_elements()];
        let p = PoissonProblem::new(m, MetricField::euclidean(), src, vec![0.5, -0.5]).unwrap();
        let s = solve_floating_potential(&p).unwrap();
        assert!((s.flux[0] - 0.5).abs() < 1e-6 && (s.flux[1] + 0.5).abs() < 1e-6);
        let s2 = solve_floating_potential(&p.scaled(2.0)).unwrap();
        assert!((s2.dual_norm() - 2.0 * s.dual_norm()).abs() < 1e-8 * s.dual_norm());
    }
}
