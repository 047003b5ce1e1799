use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::curve::winding_number;
use crate::error::{Error, Result};
use crate::numerics::V2;

/// Triangulated finitely connected planar domain.
///
/// `boundary_loops[0]` is the outer boundary, counter-clockwise; the others
/// bound the holes and run clockwise, so the domain is always on the left.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "MeshFile", into = "MeshFile")]
pub struct FCDomainMesh {
    vertices: Vec<V2>,
    triangles: Vec<[usize; 3]>,
    boundary_loops: Vec<Vec<usize>>,
    boundary_of: Vec<Option<usize>>,
    neighbors: Vec<Vec<usize>>,
    hole_seeds: Vec<V2>,
    grid: Grid,
}

#[derive(Serialize, Deserialize)]
struct MeshFile {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary_loops: Vec<Vec<usize>>,
}

impl TryFrom<MeshFile> for FCDomainMesh {
    type Error = Error;
    fn try_from(m: MeshFile) -> Result<Self> {
        let v = m.vertices.iter().map(|p| V2::new(p[0], p[1])).collect();
        FCDomainMesh::new(v, m.triangles, m.boundary_loops)
    }
}

impl From<FCDomainMesh> for MeshFile {
    fn from(m: FCDomainMesh) -> Self {
        MeshFile {
            vertices: m.vertices.iter().map(|p| [p.x, p.y]).collect(),
            triangles: m.triangles,
            boundary_loops: m.boundary_loops,
        }
    }
}

fn signed_area(a: V2, b: V2, c: V2) -> f64 {
    0.5 * ((b - a).perp(&(c - a)))
}

pub(crate) fn polygon_area(poly: &[V2]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| poly[i].perp(&poly[(i + 1) % n])).sum::<f64>() * 0.5
}

impl FCDomainMesh {
    pub fn new(vertices: Vec<V2>, triangles: Vec<[usize; 3]>, boundary_loops: Vec<Vec<usize>>) -> Result<Self> {
        let nv = vertices.len();
        if triangles.is_empty() || boundary_loops.is_empty() {
            return Err(Error::InvalidMesh("mesh needs triangles and an outer boundary".into()));
        }
        let mut edge_use: HashMap<(usize, usize), usize> = HashMap::new();
        let mut neighbors = vec![Vec::new(); nv];
        for (e, t) in triangles.iter().enumerate() {
            if t.iter().any(|&i| i >= nv) || t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::InvalidMesh(format!("triangle {e} has bad vertex indices")));
            }
            let det = 2.0 * signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
            if !(det > 0.0) {
                return Err(Error::DegenerateElement { element: e, det });
            }
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if edge_use.insert((a, b), e).is_some() {
                    return Err(Error::InvalidMesh(format!("directed edge ({a},{b}) used twice")));
                }
                if !neighbors[a].contains(&b) {
                    neighbors[a].push(b);
                }
                if !neighbors[b].contains(&a) {
                    neighbors[b].push(a);
                }
            }
        }
        let boundary_edges: Vec<(usize, usize)> =
            edge_use.keys().filter(|(a, b)| !edge_use.contains_key(&(*b, *a))).copied().collect();
        let undirected = edge_use.len() - (edge_use.len() - boundary_edges.len()) / 2;

        let mut boundary_of = vec![None; nv];
        let mut listed = 0;
        for (l, lp) in boundary_loops.iter().enumerate() {
            if lp.len() < 3 {
                return Err(Error::InvalidMesh(format!("boundary loop {l} is too short")));
            }
            for (k, &a) in lp.iter().enumerate() {
                let b = lp[(k + 1) % lp.len()];
                if a >= nv || boundary_of[a].is_some() {
                    return Err(Error::InvalidMesh(format!("boundary loop {l} repeats or misses vertex {a}")));
                }
                boundary_of[a] = Some(l);
                if !edge_use.contains_key(&(a, b)) || edge_use.contains_key(&(b, a)) {
                    return Err(Error::InvalidMesh(format!(
                        "({a},{b}) in loop {l} is not a boundary edge with the domain on its left"
                    )));
                }
                listed += 1;
            }
            let poly: Vec<V2> = lp.iter().map(|&i| vertices[i]).collect();
            let area = polygon_area(&poly);
            if (l == 0) != (area > 0.0) {
                return Err(Error::InvalidMesh(format!("boundary loop {l} has the wrong orientation")));
            }
        }
        if listed != boundary_edges.len() {
            return Err(Error::InvalidMesh(format!(
                "{} boundary edges but {listed} listed in loops",
                boundary_edges.len()
            )));
        }
        let euler = nv as i64 - undirected as i64 + triangles.len() as i64;
        let expected = 2 - boundary_loops.len() as i64;
        if euler != expected {
            return Err(Error::InvalidMesh(format!("Euler characteristic {euler}, expected {expected}")));
        }

        let mut hole_seeds = Vec::new();
        for lp in &boundary_loops[1..] {
            let poly: Vec<V2> = lp.iter().map(|&i| vertices[i]).collect();
            hole_seeds.push(interior_point(&poly)?);
        }
        let grid = Grid::build(&vertices, &triangles);
        Ok(Self { vertices, triangles, boundary_loops, boundary_of, neighbors, hole_seeds, grid })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }
    pub fn num_elements(&self) -> usize {
        self.triangles.len()
    }
    pub fn num_holes(&self) -> usize {
        self.boundary_loops.len() - 1
    }
    pub fn vertices(&self) -> &[V2] {
        &self.vertices
    }
    pub fn vertex(&self, i: usize) -> V2 {
        self.vertices[i]
    }
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }
    pub fn triangle(&self, e: usize) -> [usize; 3] {
        self.triangles[e]
    }
    pub fn corners(&self, e: usize) -> [V2; 3] {
        self.triangles[e].map(|i| self.vertices[i])
    }
    pub fn boundary_loops(&self) -> &[Vec<usize>] {
        &self.boundary_loops
    }
    /// Index of the boundary loop containing vertex `v`, if any.
    pub fn boundary_of(&self, v: usize) -> Option<usize> {
        self.boundary_of[v]
    }
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }
    /// A point strictly inside hole `i` (1-based, matching `boundary_loops`).
    pub fn hole_seed(&self, i: usize) -> V2 {
        self.hole_seeds[i - 1]
    }

    pub fn area(&self, e: usize) -> f64 {
        let [a, b, c] = self.corners(e);
        signed_area(a, b, c)
    }

    pub fn barycenter(&self, e: usize) -> V2 {
        let [a, b, c] = self.corners(e);
        (a + b + c) / 3.0
    }

    pub fn loop_polygon(&self, l: usize) -> Vec<V2> {
        self.boundary_loops[l].iter().map(|&i| self.vertices[i]).collect()
    }

    /// Longest edge over all elements.
    pub fn max_edge(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|t| (0..3).map(move |k| (t[k], t[(k + 1) % 3])))
            .map(|(a, b)| (self.vertices[a] - self.vertices[b]).norm())
            .fold(0.0, f64::max)
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.grid.bounds;
        (hi - lo).norm()
    }

    /// Element containing `p` and its barycentric coordinates.
    pub fn locate(&self, p: V2) -> Option<(usize, [f64; 3])> {
        let tol = -1e-12;
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &e in self.grid.candidates(p) {
            let [a, b, c] = self.corners(e);
            let area = signed_area(a, b, c);
            let l = [signed_area(p, b, c) / area, signed_area(a, p, c) / area, signed_area(a, b, p) / area];
            let worst = l[0].min(l[1]).min(l[2]);
            if worst >= 0.0 {
                return Some((e, l));
            }
            if worst >= tol && best.is_none_or(|b| worst > b.2) {
                best = Some((e, l, worst));
            }
        }
        best.map(|(e, l, _)| (e, l))
    }

    pub fn contains(&self, p: V2) -> bool {
        self.locate(p).is_some()
    }
}

/// A point inside a simple polygon: the area centroid if it lies inside,
/// else the best midpoint of a chord through the centroid.
fn interior_point(poly: &[V2]) -> Result<V2> {
    let n = poly.len();
    let a = polygon_area(poly);
    let mut c = V2::zeros();
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        c += (p + q) * p.perp(&q);
    }
    c /= 6.0 * a;
    if winding_number(poly, c) != 0 {
        return Ok(c);
    }
    for i in 0..n {
        let m = (poly[i] + poly[(i + 1) % n]) * 0.5;
        for t in [0.25, 0.5, 0.75] {
            let q = m + (c - m) * t * 0.1;
            if winding_number(poly, q) != 0 {
                return Ok(q);
            }
        }
    }
    Err(Error::InvalidMesh("could not find a point inside a hole".into()))
}

/// Uniform bucket grid over element bounding boxes.
#[derive(Debug, Clone)]
struct Grid {
    bounds: (V2, V2),
    n: usize,
    cells: Vec<Vec<usize>>,
}

impl Grid {
    fn build(vertices: &[V2], triangles: &[[usize; 3]]) -> Self {
        let mut lo = V2::repeat(f64::INFINITY);
        let mut hi = V2::repeat(f64::NEG_INFINITY);
        for v in vertices {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        let n = ((triangles.len() as f64).sqrt().ceil() as usize).clamp(1, 512);
        let mut grid = Self { bounds: (lo, hi), n, cells: vec![Vec::new(); n * n] };
        for (e, t) in triangles.iter().enumerate() {
            let mut a = V2::repeat(f64::INFINITY);
            let mut b = V2::repeat(f64::NEG_INFINITY);
            for &i in t {
                a = a.inf(&vertices[i]);
                b = b.sup(&vertices[i]);
            }
            let (i0, j0) = grid.cell(a);
            let (i1, j1) = grid.cell(b);
            for i in i0..=i1 {
                for j in j0..=j1 {
                    grid.cells[i * n + j].push(e);
                }
            }
        }
        grid
    }

    fn cell(&self, p: V2) -> (usize, usize) {
        let (lo, hi) = self.bounds;
        let ext = (hi - lo).sup(&V2::repeat(1e-300));
        let f = |t: f64| ((t * self.n as f64) as isize).clamp(0, self.n as isize - 1) as usize;
        (f((p.x - lo.x) / ext.x), f((p.y - lo.y) / ext.y))
    }

    fn candidates(&self, p: V2) -> &[usize] {
        let (lo, hi) = self.bounds;
        let pad = 1e-9 * (hi - lo).norm();
        if p.x < lo.x - pad || p.y < lo.y - pad || p.x > hi.x + pad || p.y > hi.y + pad {
            return &[];
        }
        let (i, j) = self.cell(p);
        &self.cells[i * self.n + j]
    }
}
