use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{winding_number, CurveInChart};
use crate::numerics::{trapezoid, V2};
use crate::poisson::{PoissonProblem, PotentialSolution};
use crate::tolerances::{scaled, COAREA, FLUX, GRAD_FLOOR};

/// One connected component of a level set of the potential.
#[derive(Debug, Clone)]
pub struct LevelLoop {
    pub level: f64,
    pub component: usize,
    /// Closed polyline, oriented with `{u > λ}` on its left.
    pub curve: CurveInChart,
    /// Element containing segment `k` (from point `k` to point `k + 1`).
    pub segment_elements: Vec<usize>,
    /// Recovered gradient at each point.
    pub gradients: Vec<V2>,
    /// 1-based hole indices enclosed by the loop.
    pub enclosed_holes: Vec<usize>,
    /// `∫_{Ω_λ^j} K Vol_g + Σ K_i` over the enclosed region.
    pub enclosed_total: f64,
}

impl LevelLoop {
    pub fn len(&self) -> usize {
        self.curve.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curve.is_empty()
    }

    /// Midpoint quadrature nodes `(element, point, |du|_g, dℓ_g)`.
    pub fn quadrature(&self, p: &PoissonProblem) -> Vec<(usize, V2, f64, f64)> {
        let pts = self.curve.points();
        let n = pts.len();
        (0..n)
            .map(|k| {
                let e = self.segment_elements[k];
                let (a, b) = (pts[k], pts[(k + 1) % n]);
                let g = p.metric().eval(p.mesh().barycenter(e));
                let d = b - a;
                let dl = d.dot(&(g * d)).max(0.0).sqrt();
                let gr = (self.gradients[k] + self.gradients[(k + 1) % n]) * 0.5;
                let inv = g.try_inverse().unwrap();
                (e, (a + b) * 0.5, gr.dot(&(inv * gr)).max(0.0).sqrt(), dl)
            })
            .collect()
    }

    /// `∫ |du|_g dℓ_g` along the loop.
    pub fn flux(&self, p: &PoissonProblem) -> f64 {
        self.quadrature(p).iter().map(|q| q.2 * q.3).sum()
    }

    /// Length in the metric `g`.
    pub fn length(&self, p: &PoissonProblem) -> f64 {
        self.quadrature(p).iter().map(|q| q.3).sum()
    }
}

/// Level-set machinery over a potential: recovered nodal gradients and the
/// regularity threshold.
#[derive(Debug, Clone)]
pub struct LevelSets<'a> {
    sol: &'a PotentialSolution,
    grad: Vec<V2>,
    floor: f64,
    range: (f64, f64),
}

impl<'a> LevelSets<'a> {
    pub fn new(sol: &'a PotentialSolution) -> Self {
        let p = &sol.problem;
        let m = p.mesh();
        let mut acc = vec![V2::zeros(); m.num_vertices()];
        let mut w = vec![0.0; m.num_vertices()];
        for e in 0..m.num_elements() {
            let g = p.gradient(e, &sol.u);
            let a = m.area(e);
            for v in m.triangle(e) {
                acc[v] += g * a;
                w[v] += a;
            }
        }
        let grad = acc.iter().zip(&w).map(|(g, w)| g / *w).collect();
        let range = sol.min_max();
        let floor = scaled(GRAD_FLOOR) * (range.1 - range.0) / m.diameter();
        Self { sol, grad, floor, range }
    }

    pub fn solution(&self) -> &PotentialSolution {
        self.sol
    }

    pub fn range(&self) -> (f64, f64) {
        self.range
    }

    /// `n` levels at uniform quantiles of the nodal values, pulled inside the
    /// open range and deduplicated.
    pub fn quantile_levels(&self, n: usize) -> Vec<f64> {
        let (lo, hi) = self.range;
        if !(hi > lo) || n == 0 {
            return Vec::new();
        }
        let mut u = self.sol.u.clone();
        u.sort_by(f64::total_cmp);
        let inset = 1e-9 * (hi - lo);
        let mut out: Vec<f64> = (0..n)
            .map(|k| {
                let q = if n == 1 { 0.5 } else { k as f64 / (n - 1) as f64 };
                let x = u[((u.len() - 1) as f64 * q).round() as usize];
                x.clamp(lo + inset, hi - inset)
            })
            .collect();
        out.dedup_by(|a, b| (*a - *b).abs() <= inset);
        out
    }

    fn check_level(&self, level: f64) -> Result<()> {
        let (lo, hi) = self.range;
        if !(level > lo && level < hi) {
            return Err(Error::LevelOutOfRange { level, min: lo, max: hi });
        }
        let tie = scaled(GRAD_FLOOR) * (hi - lo);
        for c in std::iter::once(0.0).chain(self.sol.hole_constants.iter().copied()) {
            if (level - c).abs() <= tie {
                return Err(Error::NearCriticalLevel { level, grad: 0.0 });
            }
        }
        Ok(())
    }

    /// Segment of the level line in element `e`, oriented with `{u > λ}` on
    /// the left, as `(edge key, point, gradient)` pairs.
    fn segment(&self, e: usize, level: f64) -> Option<[((usize, usize), V2, V2); 2]> {
        let m = self.sol.problem.mesh();
        let t = m.triangle(e);
        let u = &self.sol.u;
        let above = t.map(|v| u[v] > level);
        if above.iter().all(|a| *a) || above.iter().all(|a| !*a) {
            return None;
        }
        let mut cuts = Vec::with_capacity(2);
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            if above[k] != above[(k + 1) % 3] {
                let s = (level - u[a]) / (u[b] - u[a]);
                let p = m.vertex(a) * (1.0 - s) + m.vertex(b) * s;
                let g = self.grad[a] * (1.0 - s) + self.grad[b] * s;
                cuts.push(((a.min(b), a.max(b)), p, g));
            }
        }
        let gu = self.sol.problem.gradient(e, u);
        let d = cuts[1].1 - cuts[0].1;
        if d.x * gu.y - d.y * gu.x < 0.0 {
            cuts.swap(0, 1);
        }
        Some([cuts[0], cuts[1]])
    }

    /// Sum of `g`-lengths of all components at `level` (no linking).
    pub fn total_length(&self, level: f64) -> f64 {
        let p = &self.sol.problem;
        (0..p.mesh().num_elements())
            .filter_map(|e| {
                let s = self.segment(e, level)?;
                let g = p.metric().eval(p.mesh().barycenter(e));
                let d = s[1].1 - s[0].1;
                Some(d.dot(&(g * d)).max(0.0).sqrt())
            })
            .sum()
    }

    pub fn extract(&self, level: f64) -> Result<Vec<LevelLoop>> {
        self.check_level(level)?;
        let p = &self.sol.problem;
        let m = p.mesh();
        let segs: Vec<(usize, [((usize, usize), V2, V2); 2])> =
            (0..m.num_elements()).filter_map(|e| self.segment(e, level).map(|s| (e, s))).collect();
        let mut by_start: HashMap<(usize, usize), usize> = HashMap::with_capacity(segs.len());
        for (i, (_, s)) in segs.iter().enumerate() {
            by_start.insert(s[0].0, i);
        }
        let mut used = vec![false; segs.len()];
        let mut loops = Vec::new();
        for start in 0..segs.len() {
            if used[start] {
                continue;
            }
            let (mut pts, mut els, mut grads) = (Vec::new(), Vec::new(), Vec::new());
            let mut i = start;
            loop {
                used[i] = true;
                let (e, s) = &segs[i];
                pts.push(s[0].1);
                grads.push(s[0].2);
                els.push(*e);
                match by_start.get(&s[1].0) {
                    Some(&j) if j == start => break,
                    Some(&j) if !used[j] => i = j,
                    _ => {
                        return Err(Error::NearCriticalLevel { level, grad: 0.0 });
                    }
                }
            }
            // drop coincident points (level through a vertex)
            let mut keep = Vec::with_capacity(pts.len());
            for k in 0..pts.len() {
                let next = (k + 1) % pts.len();
                if (pts[k] - pts[next]).norm() > 1e-14 * m.diameter() {
                    keep.push(k);
                }
            }
            if keep.len() < 3 {
                continue;
            }
            let min_grad = keep
                .iter()
                .map(|&k| grads[k])
                .map(|g: V2| g.norm())
                .fold(f64::INFINITY, f64::min);
            if min_grad < self.floor {
                return Err(Error::NearCriticalLevel { level, grad: min_grad });
            }
            let points: Vec<V2> = keep.iter().map(|&k| pts[k]).collect();
            let curve = CurveInChart::from_samples(points, false)?;
            let enclosed_holes: Vec<usize> =
                (1..=m.num_holes()).filter(|&h| curve.winding_around(m.hole_seed(h)) != 0).collect();
            loops.push(LevelLoop {
                level,
                component: loops.len(),
                curve,
                segment_elements: keep.iter().map(|&k| els[k]).collect(),
                gradients: keep.iter().map(|&k| grads[k]).collect(),
                enclosed_holes,
                enclosed_total: 0.0,
            });
        }
        for lp in loops.iter_mut() {
            lp.enclosed_total = self.enclosed_total(lp);
        }
        Ok(loops)
    }

    fn enclosed_total(&self, lp: &LevelLoop) -> f64 {
        let p = &self.sol.problem;
        let m = p.mesh();
        let u = &self.sol.u;
        let poly = lp.curve.points();
        let ccw = crate::geometry::polygon_area(poly) > 0.0;
        let crossed: std::collections::HashSet<usize> = lp.segment_elements.iter().copied().collect();
        let area: f64 = (0..m.num_elements())
            .into_par_iter()
            .filter(|&e| p.source()[e] != 0.0)
            .map(|e| {
                let frac = if crossed.contains(&e) {
                    // left of the loop is {u > λ}; inside is the left for ccw loops
                    let up = superlevel_fraction(m.triangle(e).map(|v| u[v]), lp.level);
                    if ccw {
                        up
                    } else {
                        1.0 - up
                    }
                } else if winding_number(poly, m.barycenter(e)) != 0 {
                    1.0
                } else {
                    0.0
                };
                frac * p.source()[e] * p.element_volume(e)
            })
            .sum();
        area + lp.enclosed_holes.iter().map(|&h| p.hole_charges()[h - 1]).sum::<f64>()
    }
}

/// Area fraction of a linear triangle where `u > λ`.
fn superlevel_fraction(u: [f64; 3], level: f64) -> f64 {
    let above: Vec<usize> = (0..3).filter(|&k| u[k] > level).collect();
    let lone = |k: usize| {
        let (a, b) = ((k + 1) % 3, (k + 2) % 3);
        ((u[k] - level) / (u[k] - u[a])) * ((u[k] - level) / (u[k] - u[b]))
    };
    match above.len() {
        0 => 0.0,
        3 => 1.0,
        1 => lone(above[0]),
        _ => {
            let below = (0..3).find(|k| !above.contains(k)).unwrap();
            1.0 - lone(below)
        }
    }
}

pub fn extract_level_loops(sol: &PotentialSolution, level: f64) -> Result<Vec<LevelLoop>> {
    LevelSets::new(sol).extract(level)
}

#[derive(Debug, Clone, Serialize)]
pub struct LeafFlux {
    /// `∫ |du_K|_g dℓ_g`.
    pub flux: f64,
    /// `|∫_{Ω_λ^j} K + Σ K_i|`.
    pub enclosed: f64,
    pub residual: f64,
    pub l1: f64,
    pub holds: bool,
}

/// Green's-theorem identity on one leaf plus the bound by `‖K‖_{L¹_MC}`.
pub fn leaf_flux_identity(sol: &PotentialSolution, lp: &LevelLoop) -> LeafFlux {
    let p = &sol.problem;
    let flux = lp.flux(p);
    let enclosed = lp.enclosed_total.abs();
    let l1 = crate::poisson::l1mc_norm(p);
    let tol = scaled(FLUX) * l1.max(1e-300);
    let residual = (flux - enclosed).abs();
    LeafFlux { flux, enclosed, residual, l1, holds: residual <= tol && flux <= l1 + tol }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoareaCheck {
    /// `∫ |du|_g Vol_g`.
    pub area_side: f64,
    /// `∫ Length_g(u⁻¹(λ)) dλ`.
    pub level_side: f64,
    pub residual: f64,
    pub levels: usize,
    pub holds: bool,
}

/// Coarea check for an arbitrary nodal function on a problem's mesh and metric.
pub fn coarea_residual(p: &PoissonProblem, u: &[f64], n_levels: usize) -> CoareaCheck {
    let sol = PotentialSolution {
        problem: p.clone(),
        u: u.to_vec(),
        hole_constants: Vec::new(),
        energy: 0.0,
        flux: Vec::new(),
        flux_gradient: Vec::new(),
        cg: crate::poisson::CgStats { iterations: 0, relative_residual: 0.0 },
    };
    coarea_of(&LevelSets::new(&sol), n_levels)
}

pub fn coarea_check(sol: &PotentialSolution) -> CoareaCheck {
    coarea_of(&LevelSets::new(sol), 200)
}

fn coarea_of(ls: &LevelSets, n_levels: usize) -> CoareaCheck {
    let sol = ls.solution();
    let p = &sol.problem;
    let area_side: f64 = (0..p.mesh().num_elements())
        .map(|e| p.gradient_norm(e, &sol.u) * p.element_volume(e))
        .sum();
    let (lo, hi) = ls.range();
    // quantiles collapse onto plateaus (rim, holes) on coarse meshes, so merge in a uniform grid
    let mut levels = ls.quantile_levels(n_levels);
    if hi > lo && n_levels > 0 {
        let inset = 1e-9 * (hi - lo);
        levels.extend((1..=n_levels).map(|k| lo + (hi - lo) * k as f64 / (n_levels + 1) as f64));
        levels.sort_by(f64::total_cmp);
        levels.dedup_by(|a, b| (*a - *b).abs() <= inset);
    }
    let (level_side, count) = if levels.is_empty() {
        (0.0, 0)
    } else {
        let mut lengths: Vec<f64> = levels.par_iter().map(|&l| ls.total_length(l)).collect();
        // extend to the ends of the range with the nearest leaf length
        levels.insert(0, lo);
        lengths.insert(0, lengths[0]);
        levels.push(hi);
        lengths.push(*lengths.last().unwrap());
        (trapezoid(&levels, &lengths), levels.len() - 2)
    };
    let residual = (area_side - level_side).abs() / area_side.max(1e-300);
    let residual = if area_side == 0.0 && level_side == 0.0 { 0.0 } else { residual };
    CoareaCheck { area_side, level_side, residual, levels: count, holds: residual < scaled(COAREA) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::meshgen::graded_annulus;
    use crate::geometry::MetricField;
    use crate::poisson::solve_floating_potential;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn annulus_solution() -> PotentialSolution {
        let m = Arc::new(graded_annulus(0.1, 1.0, 24).unwrap());
        let src = vec![0.0; m.num_elements()];
        let p = PoissonProblem::new(m, MetricField::euclidean(), src, vec![1.0]).unwrap();
        solve_floating_potential(&p).unwrap()
    }

    #[test]
    fn superlevel_fraction_cases() {
        assert_eq!(superlevel_fraction([1.0, 0.0, 0.0], 0.5), 0.25);
        assert_eq!(superlevel_fraction([0.0, 1.0, 1.0], 0.5), 0.75);
    }

    #[test]
    fn annulus_leaves_are_circles() {
        let s = annulus_solution();
        let level = 0.5 * s.hole_constants[0];
        let loops = extract_level_loops(&s, level).unwrap();
        assert_eq!(loops.len(), 1);
        let r_exact = (-2.0 * PI * level).exp();
        for q in loops[0].curve.points() {
            assert!((q.norm() - r_exact).abs() < 0.02 * r_exact);
        }
        assert_eq!(loops[0].enclosed_holes, vec![1]);
        let f = leaf_flux_identity(&s, &loops[0]);
        assert!((f.enclosed - 1.0).abs() < 1e-12);
        assert!(f.holds, "{f:?}");
        assert!(matches!(extract_level_loops(&s, 10.0), Err(Error::LevelOutOfRange { .. })));
    }

    #[test]
    fn coarea_for_radius_function() {
        let s = annulus_solution();
        let m = s.problem.mesh();
        let u: Vec<f64> = m.vertices().iter().map(|v| v.norm()).collect();
        let c = coarea_residual(&s.problem, &u, 200);
        assert!(c.residual < 1e-3, "{c:?}");
        let exact = PI * (1.0 - 0.01);
        assert!((c.area_side - exact).abs() / exact < 1e-2);
        let z = coarea_residual(&s.problem, &vec![0.0; m.num_vertices()], 200);
        assert_eq!(z.residual, 0.0);
    }
}
