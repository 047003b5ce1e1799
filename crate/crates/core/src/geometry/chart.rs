use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Matrix3x2};
use serde::Serialize;

use super::curve::{winding_number, CurveInChart};
use super::mesh::FCDomainMesh;
use super::metric::{MetricField, Sym2};
use super::surface::{position_f64, surface_jet, InducedMetric, Surface, SurfaceJet};
use crate::error::{Error, Result};
use crate::framed::FramedLoop;
use crate::numerics::{V2, V3};
use crate::tolerances::{scaled, CURV_ANALYTIC, CURV_MESHED};

/// Per-triangle quadrature for area integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ElementRule {
    #[default]
    Barycenter,
    /// Three interior points, exact for quadratics.
    ThreePoint,
}

impl ElementRule {
    fn points(self) -> &'static [([f64; 3], f64)] {
        const ONE: [([f64; 3], f64); 1] = [([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 1.0)];
        const THREE: [([f64; 3], f64); 3] = [
            ([2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0], 1.0 / 3.0),
            ([1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0], 1.0 / 3.0),
            ([1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0], 1.0 / 3.0),
        ];
        match self {
            ElementRule::Barycenter => &ONE,
            ElementRule::ThreePoint => &THREE,
        }
    }
}

/// Extrinsic geometry at one chart point.
#[derive(Debug, Clone, Copy)]
pub struct PointGeometry {
    pub position: V3,
    pub normal: V3,
    /// `∂_x N`, `∂_y N`.
    pub dn: [V3; 2],
    pub g: Sym2,
    pub sqrt_det: f64,
    /// Gauss-map Jacobian `⟨N, N_x × N_y⟩ / √det g`.
    pub k_extrinsic: f64,
    pub mean: f64,
    /// `g^{ij}⟨N_i, N_j⟩`.
    pub dn_sq: f64,
}

impl PointGeometry {
    pub fn from_jet(j: &SurfaceJet) -> Option<Self> {
        let n = j.fx.cross(&j.fy);
        let len = n.norm();
        let g = Sym2::new(j.fx.dot(&j.fx), j.fx.dot(&j.fy), j.fx.dot(&j.fy), j.fy.dot(&j.fy));
        let det = g.determinant();
        if !(det > 0.0) || !(len > 0.0) {
            return None;
        }
        let normal = n / len;
        let nx = j.fxx.cross(&j.fy) + j.fx.cross(&j.fxy);
        let ny = j.fxy.cross(&j.fy) + j.fx.cross(&j.fyy);
        let project = |d: V3| (d - normal * normal.dot(&d)) / len;
        let dn = [project(nx), project(ny)];
        let inv = g.try_inverse()?;
        let sqrt_det = det.sqrt();
        let k_extrinsic = normal.dot(&dn[0].cross(&dn[1])) / sqrt_det;
        let second = Sym2::new(j.fxx.dot(&normal), j.fxy.dot(&normal), j.fxy.dot(&normal), j.fyy.dot(&normal));
        let mean = 0.5 * (inv * second).trace();
        let mut dn_sq = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                dn_sq += inv[(a, b)] * dn[a].dot(&dn[b]);
            }
        }
        Some(Self { position: j.f, normal, dn, g, sqrt_det, k_extrinsic, mean, dn_sq })
    }

    /// `|4H² − 2K − |dN|²|`.
    pub fn identity_residual(&self) -> f64 {
        (4.0 * self.mean * self.mean - 2.0 * self.k_extrinsic - self.dn_sq).abs()
    }
}

/// Element-averaged curvature quantities; `vol[e]` is the element's area in
/// the induced metric and the other fields are `vol`-weighted averages.
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureFields {
    pub k_extrinsic: Vec<f64>,
    pub k_intrinsic: Vec<f64>,
    pub mean: Vec<f64>,
    pub dn_sq: Vec<f64>,
    pub vol: Vec<f64>,
    /// Smallest `|dN|² − 2|K|` over each element's quadrature points.
    pub agm_margin: Vec<f64>,
    /// Largest `|4H² − 2K − |dN|²|` over all quadrature points.
    pub identity_residual: f64,
}

impl CurvatureFields {
    pub fn bending_energy(&self) -> f64 {
        self.dn_sq.iter().zip(&self.vol).map(|(a, v)| a * v).sum()
    }
    pub fn total_curvature(&self) -> f64 {
        self.k_extrinsic.iter().zip(&self.vol).map(|(a, v)| a * v).sum()
    }
    pub fn total_abs_curvature(&self) -> f64 {
        self.k_extrinsic.iter().zip(&self.vol).map(|(a, v)| a.abs() * v).sum()
    }
    pub fn area(&self) -> f64 {
        self.vol.iter().sum()
    }
    /// `∫|K_ext − K_int| Vol_g`.
    pub fn curvature_discrepancy(&self) -> f64 {
        self.k_extrinsic
            .iter()
            .zip(&self.k_intrinsic)
            .zip(&self.vol)
            .map(|((a, b), v)| (a - b).abs() * v)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AgmReport {
    pub worst_margin: f64,
    pub element: usize,
}

trait SurfaceEval: Send + Sync {
    fn position(&self, p: V2) -> V3;
    fn jet(&self, p: V2) -> SurfaceJet;
}

struct Analytic<S>(S);

impl<S: Surface> SurfaceEval for Analytic<S> {
    fn position(&self, p: V2) -> V3 {
        position_f64(&self.0, p)
    }
    fn jet(&self, p: V2) -> SurfaceJet {
        surface_jet(&self.0, p)
    }
}

#[derive(Clone)]
enum Source {
    Analytic(Arc<dyn SurfaceEval>),
    Meshed(Arc<Vec<V3>>),
}

/// An immersion of a triangulated planar domain into ℝ³ together with its
/// induced metric and curvature fields.
#[derive(Clone)]
pub struct ImmersedChart {
    mesh: Arc<FCDomainMesh>,
    source: Source,
    metric: MetricField,
    fields: CurvatureFields,
    vertex_geometry: Vec<PointGeometry>,
}

impl std::fmt::Debug for ImmersedChart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ImmersedChart")
            .field("elements", &self.mesh.num_elements())
            .field("analytic", &self.is_analytic())
            .finish()
    }
}

const DET_FLOOR: f64 = 1e-14;

impl ImmersedChart {
    /// Chart of a closed-form immersion with exact derivatives.
    pub fn from_surface<S>(mesh: Arc<FCDomainMesh>, surface: S, rule: ElementRule) -> Result<Self>
    where
        S: Surface + Clone + 'static,
    {
        let samples: Vec<V2> = (0..mesh.num_elements()).map(|e| mesh.barycenter(e)).collect();
        let eval: Arc<dyn SurfaceEval> = Arc::new(Analytic(surface.clone()));
        let mut pts = Vec::new();
        for e in 0..mesh.num_elements() {
            let c = mesh.corners(e);
            for (l, w) in rule.points() {
                let p = c[0] * l[0] + c[1] * l[1] + c[2] * l[2];
                let geo = PointGeometry::from_jet(&eval.jet(p));
                match geo {
                    Some(g) if g.sqrt_det * g.sqrt_det > DET_FLOOR => pts.push((e, p, *w, g)),
                    other => {
                        return Err(Error::DegenerateElement {
                            element: e,
                            det: other.map_or(0.0, |g| g.sqrt_det * g.sqrt_det),
                        })
                    }
                }
            }
        }
        let metric = MetricField::analytic(InducedMetric(surface), &samples)?;
        let fields = accumulate(&mesh, &pts, |_, p| metric.gaussian_curvature(p));
        let vertex_geometry = (0..mesh.num_vertices())
            .map(|v| {
                PointGeometry::from_jet(&eval.jet(mesh.vertex(v)))
                    .ok_or(Error::DegenerateElement { element: usize::MAX, det: 0.0 })
            })
            .collect::<Result<_>>()?;
        Ok(Self { mesh, source: Source::Analytic(eval), metric, fields, vertex_geometry })
    }

    /// Chart of a piecewise-linear immersion given by vertex positions.
    /// Curvatures come from quadratic fits over each element's neighbourhood;
    /// intrinsic curvature from angle defects.
    pub fn from_positions(mesh: Arc<FCDomainMesh>, positions: Vec<V3>) -> Result<Self> {
        if positions.len() != mesh.num_vertices() {
            return Err(Error::InvalidMesh(format!(
                "{} positions for {} vertices",
                positions.len(),
                mesh.num_vertices()
            )));
        }
        let ne = mesh.num_elements();
        let mut element_metric = Vec::with_capacity(ne);
        for e in 0..ne {
            let [a, b, c] = mesh.triangle(e);
            let [pa, pb, pc] = mesh.corners(e);
            let chart = nalgebra::Matrix2::from_columns(&[pb - pa, pc - pa]);
            let spatial = Matrix3x2::from_columns(&[positions[b] - positions[a], positions[c] - positions[a]]);
            let df = spatial * chart.try_inverse().expect("mesh triangles are non-degenerate");
            let g = df.transpose() * df;
            let det = g.determinant();
            if !(det > DET_FLOOR) {
                return Err(Error::DegenerateElement { element: e, det });
            }
            element_metric.push(g);
        }
        let defect = angle_defect_curvature(&mesh, &positions);
        let mut pts = Vec::with_capacity(ne);
        for e in 0..ne {
            let centre = mesh.barycenter(e);
            let mut support: Vec<usize> = mesh.triangle(e).to_vec();
            for v in mesh.triangle(e) {
                for &w in mesh.neighbors(v) {
                    if !support.contains(&w) {
                        support.push(w);
                    }
                }
            }
            let jet = fit_jet(&mesh, &positions, centre, &support)
                .ok_or(Error::DegenerateElement { element: e, det: 0.0 })?;
            let mut geo = PointGeometry::from_jet(&jet).ok_or(Error::DegenerateElement { element: e, det: 0.0 })?;
            geo.sqrt_det = element_metric[e].determinant().sqrt();
            pts.push((e, centre, 1.0, geo));
        }
        let fields = accumulate(&mesh, &pts, |e, _| {
            let vs = mesh.triangle(e);
            let inner: Vec<f64> = vs.iter().filter_map(|&v| defect[v]).collect();
            if inner.is_empty() {
                pts[e].3.k_extrinsic
            } else {
                inner.iter().sum::<f64>() / inner.len() as f64
            }
        });
        let mut vertex_geometry = Vec::with_capacity(mesh.num_vertices());
        for v in 0..mesh.num_vertices() {
            let mut support = vec![v];
            let mut frontier = vec![v];
            while support.len() < 10 && !frontier.is_empty() {
                let mut next = Vec::new();
                for &u in &frontier {
                    for &w in mesh.neighbors(u) {
                        if !support.contains(&w) {
                            support.push(w);
                            next.push(w);
                        }
                    }
                }
                frontier = next;
            }
            let jet = fit_jet(&mesh, &positions, mesh.vertex(v), &support)
                .ok_or(Error::DegenerateElement { element: usize::MAX, det: 0.0 })?;
            let mut geo =
                PointGeometry::from_jet(&jet).ok_or(Error::DegenerateElement { element: usize::MAX, det: 0.0 })?;
            geo.position = positions[v];
            vertex_geometry.push(geo);
        }
        let m2 = mesh.clone();
        let metric = MetricField::sampled(
            move |p| match m2.locate(p) {
                Some((e, _)) => element_metric[e],
                None => Sym2::identity() * f64::NAN,
            },
            mesh.diameter(),
            &(0..ne).map(|e| mesh.barycenter(e)).collect::<Vec<_>>(),
        )?;
        Ok(Self { mesh, source: Source::Meshed(Arc::new(positions)), metric, fields, vertex_geometry })
    }

    pub fn mesh(&self) -> &Arc<FCDomainMesh> {
        &self.mesh
    }
    /// Pull-back metric `g = dfᵀdf`.
    pub fn metric(&self) -> &MetricField {
        &self.metric
    }
    pub fn fields(&self) -> &CurvatureFields {
        &self.fields
    }
    pub fn is_analytic(&self) -> bool {
        matches!(self.source, Source::Analytic(_))
    }
    pub fn vertex_geometry(&self) -> &[PointGeometry] {
        &self.vertex_geometry
    }
    pub fn vertex_normals(&self) -> Vec<V3> {
        self.vertex_geometry.iter().map(|g| g.normal).collect()
    }
    pub fn vertex_positions(&self) -> Vec<V3> {
        match &self.source {
            Source::Meshed(p) => p.as_ref().clone(),
            Source::Analytic(_) => self.vertex_geometry.iter().map(|g| g.position).collect(),
        }
    }

    /// Tolerance for pointwise curvature identities on this kind of chart.
    pub fn curvature_tolerance(&self) -> f64 {
        scaled(if self.is_analytic() { CURV_ANALYTIC } else { CURV_MESHED })
    }

    /// Position and unit normal at a chart point. Meshed charts interpolate
    /// vertex data linearly.
    pub fn frame_at(&self, p: V2) -> Option<(V3, V3)> {
        match &self.source {
            Source::Analytic(s) => PointGeometry::from_jet(&s.jet(p)).map(|g| (g.position, g.normal)),
            Source::Meshed(pos) => {
                let (e, l) = self.mesh.locate(p)?;
                let t = self.mesh.triangle(e);
                let x = pos[t[0]] * l[0] + pos[t[1]] * l[1] + pos[t[2]] * l[2];
                let n = self.vertex_geometry[t[0]].normal * l[0]
                    + self.vertex_geometry[t[1]].normal * l[1]
                    + self.vertex_geometry[t[2]].normal * l[2];
                Some((x, n.normalize()))
            }
        }
    }

    /// Full pointwise geometry; only available on analytic charts.
    pub fn point_geometry(&self, p: V2) -> Option<PointGeometry> {
        match &self.source {
            Source::Analytic(s) => PointGeometry::from_jet(&s.jet(p)),
            Source::Meshed(_) => None,
        }
    }

    pub fn position(&self, p: V2) -> Option<V3> {
        match &self.source {
            Source::Analytic(s) => Some(s.position(p)),
            Source::Meshed(_) => self.frame_at(p).map(|f| f.0),
        }
    }

    pub fn bending_energy(&self) -> f64 {
        self.fields.bending_energy()
    }

    /// Checks `|dN|² ≥ 2|K|` element by element.
    pub fn pointwise_agm_check(&self) -> Result<AgmReport> {
        let (element, worst) = self
            .fields
            .agm_margin
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        if worst < -self.curvature_tolerance() {
            return Err(Error::ViolationFound { element, margin: worst });
        }
        Ok(AgmReport { worst_margin: worst, element })
    }

    /// Darboux framed loop `(f∘c, N∘c)` along a chart curve.
    pub fn framed_loop(&self, curve: &CurveInChart) -> Result<FramedLoop> {
        let mut g = Vec::with_capacity(curve.len());
        let mut n = Vec::with_capacity(curve.len());
        for (k, p) in curve.points().iter().enumerate() {
            let (x, nn) = self.frame_at(*p).ok_or(Error::BoundaryTooRough(k))?;
            g.push(x);
            n.push(nn);
        }
        if curve.is_smooth() && self.is_analytic() {
            FramedLoop::new(g, n)
        } else {
            FramedLoop::polyline(g, n)
        }
    }

    /// Per-sample geodesic curvature and its total `∫κ_g dℓ`.
    pub fn geodesic_curvature(&self, curve: &CurveInChart) -> Result<(Vec<f64>, f64)> {
        let lp = self.framed_loop(curve)?;
        Ok((lp.geodesic_curvature(), lp.total_geodesic_curvature()))
    }

    /// Elements whose barycentre lies inside the curve.
    pub fn elements_inside(&self, curve: &CurveInChart) -> Vec<usize> {
        (0..self.mesh.num_elements())
            .filter(|&e| winding_number(curve.points(), self.mesh.barycenter(e)) != 0)
            .collect()
    }

    /// Curvature hidden in hole `i`: `2π − ∫κ_g dℓ − ∫K` over the region
    /// between the hole and a counter-clockwise test curve around it.
    pub fn enclosed_curvature(&self, hole: usize, curve: &CurveInChart) -> Result<f64> {
        check_homotopy(&self.mesh, hole, curve)?;
        let (_, kg) = self.geodesic_curvature(curve)?;
        let k: f64 = self
            .elements_inside(curve)
            .iter()
            .map(|&e| self.fields.k_extrinsic[e] * self.fields.vol[e])
            .sum();
        Ok(TAU - kg - k)
    }

    /// `|∫K + ∫κ_g − 2π|` for the disc-type region inside `curve`.
    pub fn gauss_bonnet_residual(&self, curve: &CurveInChart) -> Result<f64> {
        let (_, kg) = self.geodesic_curvature(curve)?;
        let k: f64 = self
            .elements_inside(curve)
            .iter()
            .map(|&e| self.fields.k_extrinsic[e] * self.fields.vol[e])
            .sum();
        Ok((k + kg - TAU).abs())
    }
}

fn check_homotopy(mesh: &FCDomainMesh, hole: usize, curve: &CurveInChart) -> Result<()> {
    for j in 1..=mesh.num_holes() {
        let w = curve.winding_around(mesh.hole_seed(j));
        let expected = if j == hole { 1 } else { 0 };
        if w != expected {
            return Err(Error::HomotopyClassAmbiguous(j));
        }
    }
    Ok(())
}

/// Intrinsic version of [`ImmersedChart::enclosed_curvature`] for a metric
/// with no immersion at hand: Christoffel-symbol geodesic curvature and
/// Brioschi Gaussian curvature.
pub fn enclosed_curvature_intrinsic(
    metric: &MetricField,
    mesh: &FCDomainMesh,
    hole: usize,
    curve: &CurveInChart,
) -> Result<f64> {
    check_homotopy(mesh, hole, curve)?;
    let omega = crate::framed::turning_density(metric, curve);
    let kg = omega.iter().sum::<f64>() * TAU / curve.len() as f64;
    let k: f64 = (0..mesh.num_elements())
        .filter(|&e| winding_number(curve.points(), mesh.barycenter(e)) != 0)
        .map(|e| {
            let p = mesh.barycenter(e);
            metric.gaussian_curvature(p) * metric.sqrt_det(p) * mesh.area(e)
        })
        .sum();
    Ok(TAU - kg - k)
}

fn accumulate(
    mesh: &FCDomainMesh,
    pts: &[(usize, V2, f64, PointGeometry)],
    k_int: impl Fn(usize, V2) -> f64,
) -> CurvatureFields {
    let ne = mesh.num_elements();
    let mut f = CurvatureFields {
        k_extrinsic: vec![0.0; ne],
        k_intrinsic: vec![0.0; ne],
        mean: vec![0.0; ne],
        dn_sq: vec![0.0; ne],
        vol: vec![0.0; ne],
        agm_margin: vec![f64::INFINITY; ne],
        identity_residual: 0.0,
    };
    for &(e, p, w, ref g) in pts {
        let dv = w * mesh.area(e) * g.sqrt_det;
        f.vol[e] += dv;
        f.k_extrinsic[e] += g.k_extrinsic * dv;
        f.k_intrinsic[e] += k_int(e, p) * dv;
        f.mean[e] += g.mean * dv;
        f.dn_sq[e] += g.dn_sq * dv;
        f.agm_margin[e] = f.agm_margin[e].min(g.dn_sq - 2.0 * g.k_extrinsic.abs());
        f.identity_residual = f.identity_residual.max(g.identity_residual());
    }
    for e in 0..ne {
        let v = f.vol[e];
        f.k_extrinsic[e] /= v;
        f.k_intrinsic[e] /= v;
        f.mean[e] /= v;
        f.dn_sq[e] /= v;
    }
    f
}

/// Least-squares quadratic fit of the positions at `support` around `centre`.
fn fit_jet(mesh: &FCDomainMesh, positions: &[V3], centre: V2, support: &[usize]) -> Option<SurfaceJet> {
    if support.len() < 6 {
        return None;
    }
    let h = support.iter().map(|&v| (mesh.vertex(v) - centre).norm()).fold(0.0, f64::max);
    let mut a = DMatrix::zeros(support.len(), 6);
    for (r, &v) in support.iter().enumerate() {
        let d = (mesh.vertex(v) - centre) / h;
        let row = [1.0, d.x, d.y, d.x * d.x, d.x * d.y, d.y * d.y];
        for (c, val) in row.iter().enumerate() {
            a[(r, c)] = *val;
        }
    }
    let svd = a.svd(true, true);
    let mut coeff = [V3::zeros(); 6];
    for i in 0..3 {
        let b = DVector::from_iterator(support.len(), support.iter().map(|&v| positions[v][i]));
        let x = svd.solve(&b, 1e-10).ok()?;
        for c in 0..6 {
            coeff[c][i] = x[c];
        }
    }
    Some(SurfaceJet {
        f: coeff[0],
        fx: coeff[1] / h,
        fy: coeff[2] / h,
        fxx: coeff[3] * (2.0 / (h * h)),
        fxy: coeff[4] / (h * h),
        fyy: coeff[5] * (2.0 / (h * h)),
    })
}

/// Angle defect over one third of the incident area at interior vertices.
fn angle_defect_curvature(mesh: &FCDomainMesh, positions: &[V3]) -> Vec<Option<f64>> {
    let nv = mesh.num_vertices();
    let mut angle = vec![0.0; nv];
    let mut area = vec![0.0; nv];
    for t in mesh.triangles() {
        let p = t.map(|i| positions[i]);
        let a = 0.5 * (p[1] - p[0]).cross(&(p[2] - p[0])).norm();
        for k in 0..3 {
            let (u, v) = (p[(k + 1) % 3] - p[k], p[(k + 2) % 3] - p[k]);
            angle[t[k]] += u.cross(&v).norm().atan2(u.dot(&v));
            area[t[k]] += a / 3.0;
        }
    }
    (0..nv)
        .map(|v| mesh.boundary_of(v).is_none().then(|| (TAU - angle[v]) / area[v]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::meshgen::{annulus, disc, Grading};
    use crate::geometry::{ConeSurface, Cylinder, Plane, Sphere};
    use std::f64::consts::PI;

    #[test]
    fn plane_has_no_curvature() {
        let m = Arc::new(disc(1.0, 6).unwrap());
        let c = ImmersedChart::from_surface(m, Plane, ElementRule::Barycenter).unwrap();
        assert_eq!(c.bending_energy(), 0.0);
        assert!(c.fields().k_extrinsic.iter().all(|k| k.abs() < 1e-14));
    }

    #[test]
    fn sphere_pointwise_values() {
        let m = Arc::new(disc(1.0, 8).unwrap());
        let rho = 2.0;
        let c = ImmersedChart::from_surface(m, Sphere { radius: rho }, ElementRule::Barycenter).unwrap();
        let f = c.fields();
        for e in 0..f.vol.len() {
            assert!((f.k_extrinsic[e] - 1.0 / (rho * rho)).abs() < 1e-10);
            assert!((f.k_intrinsic[e] - 1.0 / (rho * rho)).abs() < 1e-8);
            assert!((f.mean[e].abs() - 1.0 / rho).abs() < 1e-10);
            assert!((f.dn_sq[e] - 2.0 / (rho * rho)).abs() < 1e-10);
        }
        assert!(f.identity_residual < 1e-10);
        assert!(c.pointwise_agm_check().unwrap().worst_margin.abs() < 1e-10);
    }

    #[test]
    fn hemisphere_energy() {
        let m = Arc::new(disc(PI / 2.0, 40).unwrap());
        let c = ImmersedChart::from_surface(m, Sphere { radius: 1.0 }, ElementRule::ThreePoint).unwrap();
        assert!((c.bending_energy() - 4.0 * PI).abs() < 1e-2, "{}", c.bending_energy());
    }

    #[test]
    fn cylinder_energy_and_margin() {
        let m = Arc::new(
            FCDomainMesh::new(
                vec![V2::new(0.0, 0.0), V2::new(TAU, 0.0), V2::new(TAU, 1.0), V2::new(0.0, 1.0)],
                vec![[0, 1, 2], [0, 2, 3]],
                vec![vec![0, 1, 2, 3]],
            )
            .unwrap(),
        );
        let c = ImmersedChart::from_surface(m, Cylinder { radius: 1.0 }, ElementRule::Barycenter).unwrap();
        assert!((c.bending_energy() - TAU).abs() < 1e-12);
        assert!((c.pointwise_agm_check().unwrap().worst_margin - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cone_loops_enclose_the_deficit() {
        let alpha = PI / 2.0;
        let cc = 1.0 - alpha / TAU;
        let m = Arc::new(annulus(0.05, 1.0, 8, 48, Grading::Geometric).unwrap());
        let c = ImmersedChart::from_surface(m, ConeSurface { c: cc }, ElementRule::Barycenter).unwrap();
        for r in [0.05, 0.3, 0.7] {
            let curve = CurveInChart::circle(V2::zeros(), r, 128);
            let (_, kg) = c.geodesic_curvature(&curve).unwrap();
            assert!((kg - (TAU - alpha)).abs() < 1e-10);
            let k1 = c.enclosed_curvature(1, &curve).unwrap();
            assert!((k1 - alpha).abs() < 1e-10);
        }
        let off = CurveInChart::circle(V2::new(0.5, 0.0), 0.1, 64);
        assert!(matches!(c.enclosed_curvature(1, &off), Err(Error::HomotopyClassAmbiguous(1))));
    }

    #[test]
    fn meshed_sphere_converges() {
        let mut prev = f64::INFINITY;
        for rings in [8, 16, 32] {
            let m = Arc::new(disc(1.0, rings).unwrap());
            let pos = m.vertices().iter().map(|p| position_f64(&Sphere { radius: 1.0 }, *p)).collect();
            let c = ImmersedChart::from_positions(m, pos).unwrap();
            let f = c.fields();
            let err = f.curvature_discrepancy() / f.area();
            assert!(err < prev, "{rings}: {err}");
            prev = err;
        }
        assert!(prev < 0.05, "{prev}");
    }
}
