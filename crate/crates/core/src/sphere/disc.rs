use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use super::degree::{DegreeField, GaussImage};
use super::winding::winding_number;
use crate::error::{Error, Result};
use crate::geometry::{CurveInChart, ImmersedChart};
use crate::numerics::{gauss_legendre, V2, V3};
use crate::tolerances::{scaled, INEQ};

/// How area integrals over a disc chart are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AreaRule {
    /// Element quadrature of the chart's curvature fields.
    Mesh,
    /// Gauss–Legendre in the radius and uniform in the angle over the chart
    /// disc `|x| < radius` (analytic charts only).
    Polar { radius: f64, n_r: usize, n_phi: usize },
}

/// Sample points of the Gauss map with weights `K dVol`.
fn curvature_samples(chart: &ImmersedChart, rule: AreaRule) -> Result<Vec<(V3, f64)>> {
    match rule {
        AreaRule::Mesh => {
            let mesh = chart.mesh();
            let f = chart.fields();
            (0..mesh.num_elements())
                .map(|e| {
                    let (_, n) = chart.frame_at(mesh.barycenter(e)).ok_or(Error::BoundaryTooRough(e))?;
                    Ok((n, f.k_extrinsic[e] * f.vol[e]))
                })
                .collect()
        }
        AreaRule::Polar { radius, n_r, n_phi } => {
            let mut out = Vec::with_capacity(n_r * n_phi);
            for (r, wr) in gauss_legendre(n_r, 0.0, radius) {
                for j in 0..n_phi {
                    let t = TAU * (j as f64 + 0.5) / n_phi as f64;
                    let p = V2::new(r * t.cos(), r * t.sin());
                    let g = chart.point_geometry(p).ok_or(Error::DerivativeUnavailable(
                        "polar quadrature needs an analytic chart",
                    ))?;
                    out.push((g.normal, g.k_extrinsic * g.sqrt_det * r * wr * TAU / n_phi as f64));
                }
            }
            Ok(out)
        }
    }
}

fn query_with_jitter(field: &DegreeField, p: &V3) -> Result<i32> {
    let mut q = *p;
    for k in 0..8 {
        match field.query(&q) {
            Err(Error::DegenerateConfiguration(_)) => {
                q = (p + V3::new(1.0, -2.0, 3.0) * (1e-6 * (k + 1) as f64)).normalize();
            }
            other => return other,
        }
    }
    field.query(&q)
}

/// The disc-level chain: boundary-image length, total curvature and the
/// degree-weighted curvature, with the three inequalities built from them.
#[derive(Debug, Clone, Serialize)]
pub struct DiscChain {
    /// Length of the boundary image `N(∂D)`.
    pub length: f64,
    /// `∫K dVol`.
    pub total_curvature: f64,
    /// `∫(Q∘N) K dVol`.
    pub degree_weighted: f64,
    /// `L² ≥ 4π∫(Q∘N)K − (∫K)²`.
    pub isoperimetric_lhs: f64,
    pub isoperimetric_rhs: f64,
    /// `∫(Q∘N)K ≥ |∫K|`.
    pub degree_bound_holds: bool,
    /// `L² ≥ (4π − |∫K|)|∫K|`.
    pub combined_rhs: f64,
    pub isoperimetric_holds: bool,
    pub combined_holds: bool,
}

pub fn check_disc_chain(chart: &ImmersedChart, boundary: &CurveInChart, rule: AreaRule) -> Result<DiscChain> {
    if chart.mesh().num_holes() != 0 {
        return Err(Error::Config("the disc chain needs a simply connected chart".into()));
    }
    let length = chart.framed_loop(boundary)?.normal_turning();
    let samples = curvature_samples(chart, rule)?;
    let total: f64 = samples.iter().map(|s| s.1).sum();
    let abs_total: f64 = samples.iter().map(|s| s.1.abs()).sum();
    // a flat chart has a one-point Gauss image and no degree field
    let degrees = if abs_total > 0.0 {
        let field = DegreeField::from_chart(chart, boundary)?;
        let d: Result<Vec<i32>> = samples.par_iter().map(|(n, _)| query_with_jitter(&field, n)).collect();
        d?
    } else {
        vec![0; samples.len()]
    };
    let weighted: f64 = samples.iter().zip(&degrees).map(|(s, q)| s.1 * *q as f64).sum();
    let tol = scaled(INEQ);
    let lhs = length * length;
    let iso_rhs = 4.0 * PI * weighted - total * total;
    let combined = (4.0 * PI - total.abs()) * total.abs();
    Ok(DiscChain {
        length,
        total_curvature: total,
        degree_weighted: weighted,
        isoperimetric_lhs: lhs,
        isoperimetric_rhs: iso_rhs,
        degree_bound_holds: weighted >= total.abs() - tol * abs_total.max(1e-300),
        combined_rhs: combined,
        isoperimetric_holds: lhs >= iso_rhs - tol * iso_rhs.abs(),
        combined_holds: lhs >= combined - tol * combined.abs(),
    })
}

/// `Q(p) − Q(q) = w(p, q)` on the triangulated Gauss image.
pub fn check_degree_winding_relation(image: &GaussImage, p: &V3, q: &V3) -> Result<bool> {
    let qp = image.degree_at(p)?;
    let qq = image.degree_at(q)?;
    let w = winding_number(image.boundary(), p, q)?;
    Ok(qp - qq == w)
}

/// Test functions on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SphereTest {
    Constant,
    Linear([f64; 3]),
    /// Degree-2 harmonics: `xy, yz, zx, x² − y², 3z² − 1`.
    Quadratic(usize),
    Cap { axis: [f64; 3], angle: f64 },
}

impl SphereTest {
    pub fn eval(&self, p: &V3) -> f64 {
        match *self {
            SphereTest::Constant => 1.0,
            SphereTest::Linear(a) => V3::from(a).dot(p),
            SphereTest::Quadratic(i) => match i {
                0 => p.x * p.y,
                1 => p.y * p.z,
                2 => p.z * p.x,
                3 => p.x * p.x - p.y * p.y,
                _ => 3.0 * p.z * p.z - 1.0,
            },
            SphereTest::Cap { axis, angle } => {
                if V3::from(axis).normalize().dot(p) >= angle.cos() {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn family() -> Vec<SphereTest> {
        let mut v = vec![
            SphereTest::Constant,
            SphereTest::Linear([1.0, 0.0, 0.0]),
            SphereTest::Linear([0.0, 1.0, 0.0]),
            SphereTest::Linear([0.0, 0.0, 1.0]),
        ];
        v.extend((0..5).map(SphereTest::Quadratic));
        v.push(SphereTest::Cap { axis: [0.0, 0.0, 1.0], angle: 0.4 });
        v.push(SphereTest::Cap { axis: [0.3, 0.0, 1.0], angle: 0.6 });
        v
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PushforwardCheck {
    pub test: SphereTest,
    /// `∫_D (h∘N) K dVol`.
    pub lhs: f64,
    /// `∫_{S²} Q h dA`.
    pub rhs: f64,
    pub residual: f64,
}

/// Compares `∫_D (h∘N) K dVol` with `∫_{S²} Q h dA` for each test function.
/// The sphere integral runs over an `n_z × 2n_z` grid of equal-area cells in
/// `(z, φ)`; cells whose corner degrees disagree are split adaptively.
pub fn pushforward_identity_check(
    chart: &ImmersedChart,
    boundary: &CurveInChart,
    rule: AreaRule,
    tests: &[SphereTest],
    n_z: usize,
) -> Result<Vec<PushforwardCheck>> {
    let field = DegreeField::from_chart(chart, boundary)?;
    let samples = curvature_samples(chart, rule)?;
    let n_phi = 2 * n_z;
    let (dz, dp) = (2.0 / n_z as f64, TAU / n_phi as f64);
    let cells: Vec<(f64, f64)> = (0..n_z)
        .flat_map(|i| (0..n_phi).map(move |j| (-1.0 + i as f64 * dz, j as f64 * dp)))
        .collect();
    let parts: Result<Vec<Vec<f64>>> = cells
        .par_iter()
        .map(|&(z, p)| cell_integral(&field, tests, [z, z + dz], [p, p + dp], 6))
        .collect();
    let mut rhs = vec![0.0; tests.len()];
    for part in parts? {
        for (r, v) in rhs.iter_mut().zip(part) {
            *r += v;
        }
    }
    tests
        .iter()
        .zip(rhs)
        .map(|(h, rhs)| {
            let lhs = match (h, rule) {
                (SphereTest::Cap { .. }, AreaRule::Polar { radius, n_r, n_phi }) => {
                    let (dr, dp) = (radius / n_r as f64, TAU / n_phi as f64);
                    let cells: Vec<(f64, f64)> = (0..n_r).flat_map(|i| (0..n_phi).map(move |j| (i as f64 * dr, j as f64 * dp))).collect();
                    let parts: Result<Vec<f64>> = cells.par_iter().map(|&(r, p)| polar_cell(chart, h, [r, r + dr], [p, p + dp], 5)).collect();
                    parts?.iter().sum()
                }
                _ => samples.iter().map(|(n, w)| h.eval(n) * w).sum(),
            };
            Ok(PushforwardCheck { test: *h, lhs, rhs, residual: (lhs - rhs).abs() })
        })
        .collect()
}

/// `∫ (h∘N) K dVol` over a polar chart cell, split where `h∘N` jumps.
fn polar_cell(chart: &ImmersedChart, h: &SphereTest, r: [f64; 2], p: [f64; 2], depth: u32) -> Result<f64> {
    let at = |rr: f64, pp: f64| {
        chart
            .point_geometry(V2::new(rr * pp.cos(), rr * pp.sin()))
            .ok_or(Error::DerivativeUnavailable("polar quadrature needs an analytic chart"))
    };
    if depth > 0 {
        let mut corner = [0.0; 4];
        for (k, c) in corner.iter_mut().enumerate() {
            *c = h.eval(&at(r[k / 2].max(1e-12), p[k % 2])?.normal);
        }
        if corner.iter().any(|v| *v != corner[0]) {
            let (rm, pm) = (0.5 * (r[0] + r[1]), 0.5 * (p[0] + p[1]));
            let mut s = 0.0;
            for rr in [[r[0], rm], [rm, r[1]]] {
                for pp in [[p[0], pm], [pm, p[1]]] {
                    s += polar_cell(chart, h, rr, pp, depth - 1)?;
                }
            }
            return Ok(s);
        }
    }
    let mut s = 0.0;
    for (rr, wr) in gauss_legendre(3, r[0], r[1]) {
        for (pp, wp) in gauss_legendre(3, p[0], p[1]) {
            let g = at(rr, pp)?;
            s += h.eval(&g.normal) * g.k_extrinsic * g.sqrt_det * rr * wr * wp;
        }
    }
    Ok(s)
}

fn sphere_point(z: f64, phi: f64) -> V3 {
    let s = (1.0 - z * z).max(0.0).sqrt();
    V3::new(s * phi.cos(), s * phi.sin(), z)
}

fn cell_integral(field: &DegreeField, tests: &[SphereTest], z: [f64; 2], p: [f64; 2], depth: u32) -> Result<Vec<f64>> {
    let mut q = [0i32; 4];
    for (k, qk) in q.iter_mut().enumerate() {
        *qk = query_with_jitter(field, &sphere_point(z[k / 2], p[k % 2]))?;
    }
    // split where the degree or an indicator test function jumps
    let jumps = tests.iter().any(|h| {
        matches!(h, SphereTest::Cap { .. }) && {
            let v: Vec<f64> = (0..4).map(|k| h.eval(&sphere_point(z[k / 2], p[k % 2]))).collect();
            v.iter().any(|x| *x != v[0])
        }
    });
    let uniform = q.iter().all(|&v| v == q[0]) && !jumps;
    if !uniform && depth > 0 {
        let (zm, pm) = (0.5 * (z[0] + z[1]), 0.5 * (p[0] + p[1]));
        let mut out = vec![0.0; tests.len()];
        for zz in [[z[0], zm], [zm, z[1]]] {
            for pp in [[p[0], pm], [pm, p[1]]] {
                for (o, v) in out.iter_mut().zip(cell_integral(field, tests, zz, pp, depth - 1)?) {
                    *o += v;
                }
            }
        }
        return Ok(out);
    }
    let qv = q.iter().sum::<i32>() as f64 / 4.0;
    // 2×2 Gauss on the cell; dA = dz dφ
    let g = 0.5 / 3f64.sqrt();
    let (zc, pc, hz, hp) = (0.5 * (z[0] + z[1]), 0.5 * (p[0] + p[1]), z[1] - z[0], p[1] - p[0]);
    let w = 0.25 * hz * hp * qv;
    Ok(tests
        .iter()
        .map(|h| {
            let mut s = 0.0;
            for a in [-g, g] {
                for b in [-g, g] {
                    s += h.eval(&sphere_point(zc + a * hz, pc + b * hp));
                }
            }
            s * w
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::meshgen::disc;
    use crate::geometry::{ElementRule, Plane, Sphere};
    use std::sync::Arc;

    #[test]
    fn cap_chain_is_an_equality() {
        let th = PI / 3.0;
        let m = Arc::new(disc(th, 6).unwrap());
        let chart = ImmersedChart::from_surface(m, Sphere { radius: 1.0 }, ElementRule::Barycenter).unwrap();
        let bdry = CurveInChart::circle(V2::zeros(), th, 1024);
        let c = check_disc_chain(&chart, &bdry, AreaRule::Polar { radius: th, n_r: 24, n_phi: 64 }).unwrap();
        let area = TAU * (1.0 - th.cos());
        assert!((c.total_curvature - area).abs() < 1e-12);
        assert!((c.degree_weighted - area).abs() < 1e-12);
        assert!((c.isoperimetric_lhs - c.isoperimetric_rhs).abs() / c.isoperimetric_rhs < 1e-10);
        assert!(c.isoperimetric_holds && c.degree_bound_holds && c.combined_holds);
    }

    #[test]
    fn flat_disc_chain_is_trivial() {
        let m = Arc::new(disc(1.0, 4).unwrap());
        let chart = ImmersedChart::from_surface(m, Plane, ElementRule::Barycenter).unwrap();
        let bdry = CurveInChart::circle(V2::zeros(), 1.0, 64);
        let c = check_disc_chain(&chart, &bdry, AreaRule::Mesh).unwrap();
        assert_eq!(c.length, 0.0);
        assert_eq!(c.total_curvature, 0.0);
        assert!(c.isoperimetric_holds);
    }

    #[test]
    fn pushforward_constant_on_cap() {
        let th = 0.7;
        let m = Arc::new(disc(th, 6).unwrap());
        let chart = ImmersedChart::from_surface(m, Sphere { radius: 1.0 }, ElementRule::Barycenter).unwrap();
        let bdry = CurveInChart::circle(V2::zeros(), th, 256);
        let rule = AreaRule::Polar { radius: th, n_r: 16, n_phi: 64 };
        let r = pushforward_identity_check(&chart, &bdry, rule, &[SphereTest::Constant, SphereTest::Linear([0.0, 0.0, 1.0])], 32).unwrap();
        let area = TAU * (1.0 - th.cos());
        assert!((r[0].lhs - area).abs() < 1e-10);
        assert!(r[0].residual / area < 1e-2, "{:?}", r[0]);
        // ∫ z over the cap = π sin²θ₀
        assert!((r[1].lhs - PI * th.sin().powi(2)).abs() < 1e-10);
        assert!(r[1].residual / r[1].lhs < 1e-2, "{:?}", r[1]);
    }
}
