//! Structured and constrained-Delaunay meshes for the standard domains.

use std::collections::HashMap;
use std::f64::consts::TAU;

use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};

use super::curve::winding_number;
use super::mesh::FCDomainMesh;
use crate::error::{Error, Result};
use crate::numerics::V2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grading {
    Uniform,
    /// Radii in geometric progression, so elements stay roughly square.
    Geometric,
}

/// Annulus `r0 < |x| < big_r` with `nr` radial intervals and `ntheta` angular
/// intervals.
pub fn annulus(r0: f64, big_r: f64, nr: usize, ntheta: usize, grading: Grading) -> Result<FCDomainMesh> {
    if !(0.0 < r0 && r0 < big_r) || nr == 0 || ntheta < 3 {
        return Err(Error::Config(format!("bad annulus r0={r0} R={big_r} nr={nr} ntheta={ntheta}")));
    }
    let radius = |i: usize| match grading {
        Grading::Uniform => r0 + (big_r - r0) * i as f64 / nr as f64,
        Grading::Geometric => r0 * (big_r / r0).powf(i as f64 / nr as f64),
    };
    let mut vertices = Vec::with_capacity((nr + 1) * ntheta);
    for i in 0..=nr {
        let r = radius(i);
        for j in 0..ntheta {
            let t = TAU * j as f64 / ntheta as f64;
            vertices.push(V2::new(r * t.cos(), r * t.sin()));
        }
    }
    let id = |i: usize, j: usize| i * ntheta + j % ntheta;
    let mut triangles = Vec::with_capacity(2 * nr * ntheta);
    for i in 0..nr {
        for j in 0..ntheta {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if (i + j) % 2 == 0 {
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            } else {
                triangles.push([a, b, d]);
                triangles.push([b, c, d]);
            }
        }
    }
    let outer = (0..ntheta).map(|j| id(nr, j)).collect();
    let inner = (0..ntheta).rev().map(|j| id(0, j)).collect();
    FCDomainMesh::new(vertices, triangles, vec![outer, inner])
}

/// Geometrically graded annulus at refinement level `nr`, with the angular
/// count chosen to keep elements close to square.
pub fn graded_annulus(r0: f64, big_r: f64, nr: usize) -> Result<FCDomainMesh> {
    let ntheta = ((TAU * nr as f64 / (big_r / r0).ln()).round() as usize).max(12);
    annulus(r0, big_r, nr, ntheta, Grading::Geometric)
}

/// Disc of the given radius: a centre node and `rings` rings of `6k` nodes.
pub fn disc(radius: f64, rings: usize) -> Result<FCDomainMesh> {
    if !(radius > 0.0) || rings == 0 {
        return Err(Error::Config(format!("bad disc radius={radius} rings={rings}")));
    }
    let mut vertices = vec![V2::zeros()];
    let mut start = vec![0usize];
    for k in 1..=rings {
        start.push(vertices.len());
        let r = radius * k as f64 / rings as f64;
        for j in 0..6 * k {
            let t = TAU * j as f64 / (6 * k) as f64;
            vertices.push(V2::new(r * t.cos(), r * t.sin()));
        }
    }
    let mut triangles = Vec::new();
    for j in 0..6 {
        triangles.push([0, 1 + j, 1 + (j + 1) % 6]);
    }
    for k in 2..=rings {
        let (ni, no) = (6 * (k - 1), 6 * k);
        let inner = |i: usize| start[k - 1] + i % ni;
        let outer = |j: usize| start[k] + j % no;
        let (mut i, mut j) = (0, 0);
        while i < ni || j < no {
            let ai = (i + 1) as f64 / ni as f64;
            let aj = (j + 1) as f64 / no as f64;
            if j < no && (i >= ni || aj <= ai) {
                triangles.push([inner(i), outer(j), outer(j + 1)]);
                j += 1;
            } else {
                triangles.push([inner(i), outer(j), inner(i + 1)]);
                i += 1;
            }
        }
    }
    let boundary = (0..6 * rings).map(|j| start[rings] + j).collect();
    FCDomainMesh::new(vertices, triangles, vec![boundary])
}

/// Disc of radius `big_r` with circular holes of radius `hole_r` centred at
/// `(±d, 0)`. `n_hole` nodes go on each hole boundary; spacing grows
/// geometrically away from the holes.
pub fn two_hole_disc(big_r: f64, d: f64, hole_r: f64, n_hole: usize) -> Result<FCDomainMesh> {
    if !(0.0 < hole_r && hole_r < d && d + hole_r < big_r) || n_hole < 8 {
        return Err(Error::Config(format!("bad two-hole domain R={big_r} d={d} r={hole_r} n={n_hole}")));
    }
    let h0 = TAU * hole_r / n_hole as f64;
    let centres = [V2::new(d, 0.0), V2::new(-d, 0.0)];
    let circle = |c: V2, r: f64, n: usize| -> Vec<V2> {
        (0..n).map(|j| {
            let t = TAU * j as f64 / n as f64;
            c + V2::new(r * t.cos(), r * t.sin())
        })
        .collect()
    };

    let mut points: Vec<V2> = Vec::new();
    let mut loops: Vec<Vec<usize>> = Vec::new();
    let n_outer = ((TAU * big_r / (big_r * 0.08).max(h0)).ceil() as usize).max(24);
    let mut add_loop = |pts: Vec<V2>, points: &mut Vec<V2>| {
        let base = points.len();
        let idx = (base..base + pts.len()).collect::<Vec<_>>();
        points.extend(pts);
        loops.push(idx);
    };
    add_loop(circle(V2::zeros(), big_r, n_outer), &mut points);
    for c in centres {
        add_loop(circle(c, hole_r, n_hole), &mut points);
    }

    // interior: concentric rings around each hole out to the midline, then
    // geometric rings around the origin
    let size = |p: V2| -> f64 {
        let dist = centres.iter().map(|c| (p - c).norm() - hole_r).fold(f64::INFINITY, f64::min);
        (h0 + 0.25 * dist).min(big_r * 0.08)
    };
    let inside = |p: V2, margin: f64| -> bool {
        p.norm() < big_r - margin && centres.iter().all(|c| (p - c).norm() > hole_r + margin)
    };
    for c in centres {
        let mut r = hole_r + h0 * 0.9;
        while r < 2.0 * d {
            let h = h0 + 0.25 * (r - hole_r);
            let n = ((TAU * r / h).ceil() as usize).max(8);
            for p in circle(c, r, n) {
                let other = centres.iter().find(|o| **o != c).unwrap();
                if (p - c).norm() <= (p - other).norm() && inside(p, 0.5 * size(p)) && p.norm() < 2.0 * d {
                    points.push(p);
                }
            }
            r += h;
        }
    }
    let mut r = 2.0 * d + 0.5 * size(V2::new(0.0, 2.0 * d));
    while r < big_r - 0.5 * size(V2::new(big_r, 0.0)) {
        let h = size(V2::new(0.0, r));
        let n = ((TAU * r / h).ceil() as usize).max(12);
        points.extend(circle(V2::zeros(), r, n));
        r += h;
    }

    let verts: Vec<Point2<f64>> = points.iter().map(|p| Point2::new(p.x, p.y)).collect();
    let mut edges = Vec::new();
    for lp in &loops {
        for k in 0..lp.len() {
            edges.push([lp[k], lp[(k + 1) % lp.len()]]);
        }
    }
    let cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::bulk_load_cdt(verts, edges)
        .map_err(|e| Error::InvalidMesh(format!("triangulation failed: {e:?}")))?;

    let key = |p: V2| (p.x.to_bits(), p.y.to_bits());
    let lookup: HashMap<(u64, u64), usize> = points.iter().enumerate().map(|(i, p)| (key(*p), i)).collect();
    let holes: Vec<Vec<V2>> = loops[1..].iter().map(|l| l.iter().map(|&i| points[i]).collect()).collect();
    let outer: Vec<V2> = loops[0].iter().map(|&i| points[i]).collect();
    let mut triangles = Vec::new();
    for face in cdt.inner_faces() {
        let vs = face.vertices().map(|v| {
            let p = v.position();
            lookup[&key(V2::new(p.x, p.y))]
        });
        let [a, b, c] = vs.map(|i| points[i]);
        let g = (a + b + c) / 3.0;
        if winding_number(&outer, g) == 0 || holes.iter().any(|h| winding_number(h, g) != 0) {
            continue;
        }
        if (b - a).perp(&(c - a)) > 0.0 {
            triangles.push(vs);
        } else {
            triangles.push([vs[0], vs[2], vs[1]]);
        }
    }
    // drop any points the triangulation left unused and renumber
    let mut used = vec![usize::MAX; points.len()];
    let mut vertices = Vec::new();
    for t in &triangles {
        for &i in t {
            if used[i] == usize::MAX {
                used[i] = vertices.len();
                vertices.push(points[i]);
            }
        }
    }
    let triangles = triangles.into_iter().map(|t| t.map(|i| used[i])).collect();
    let mut boundary = vec![loops[0].iter().map(|&i| used[i]).collect::<Vec<_>>()];
    for lp in &loops[1..] {
        boundary.push(lp.iter().rev().map(|&i| used[i]).collect());
    }
    FCDomainMesh::new(vertices, triangles, boundary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn total_area(m: &FCDomainMesh) -> f64 {
        (0..m.num_elements()).map(|e| m.area(e)).sum()
    }

    #[test]
    fn annulus_area_converges() {
        let m = graded_annulus(0.05, 1.0, 32).unwrap();
        let exact = PI * (1.0 - 0.05f64.powi(2));
        assert!((total_area(&m) - exact).abs() / exact < 5e-3);
        assert_eq!(m.num_holes(), 1);
    }

    #[test]
    fn disc_is_valid() {
        let m = disc(1.0, 10).unwrap();
        assert_eq!(m.num_holes(), 0);
        assert!((total_area(&m) - PI).abs() < 0.02);
    }

    #[test]
    fn two_hole_domain_is_valid() {
        let m = two_hole_disc(1.0, 0.05, 0.025, 24).unwrap();
        assert_eq!(m.num_holes(), 2);
        let exact = PI * (1.0 - 2.0 * 0.025f64.powi(2));
        assert!((total_area(&m) - exact).abs() / exact < 0.02, "{}", total_area(&m));
        assert!(m.hole_seed(1).x > 0.0 && m.hole_seed(2).x < 0.0);
    }
}
