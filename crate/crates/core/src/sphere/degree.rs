use rayon::prelude::*;

use super::winding::{winding_number, SphereCurve};
use crate::error::{Error, Result};
use crate::geometry::{CurveInChart, ImmersedChart};
use crate::numerics::V3;
use crate::tolerances::{scaled, GEO_DELTA};

/// Spherical image of a triangulated Gauss map.
#[derive(Debug, Clone)]
pub struct GaussImage {
    triangles: Vec<[V3; 3]>,
    boundary: SphereCurve,
}

fn det(a: &V3, b: &V3, c: &V3) -> f64 {
    a.dot(&b.cross(c))
}

impl GaussImage {
    /// Uses the chart's vertex normals; the boundary curve is the image of the
    /// outer boundary loop.
    pub fn from_chart(chart: &ImmersedChart) -> Result<Self> {
        let normals = chart.vertex_normals();
        let mesh = chart.mesh();
        let triangles = mesh.triangles().iter().map(|t| t.map(|i| normals[i])).collect();
        let boundary = SphereCurve::from_directions(mesh.boundary_loops()[0].iter().map(|&i| normals[i]))?;
        Ok(Self { triangles, boundary })
    }

    pub fn boundary(&self) -> &SphereCurve {
        &self.boundary
    }

    /// Signed number of image triangles covering `p`.
    pub fn degree_at(&self, p: &V3) -> Result<i32> {
        let delta = scaled(GEO_DELTA);
        let hits: Result<Vec<i32>> = self
            .triangles
            .par_iter()
            .map(|[a, b, c]| {
                if p.dot(&(a + b + c)) <= 0.0 {
                    return Ok(0);
                }
                let orient = det(a, b, c);
                if orient == 0.0 {
                    return Ok(0);
                }
                let s = orient.signum();
                let d = [det(a, b, p) * s, det(b, c, p) * s, det(c, a, p) * s];
                if d.iter().all(|x| *x > delta) {
                    Ok(s as i32)
                } else if d.iter().all(|x| *x > -delta) {
                    Err(Error::NotRegularValue)
                } else {
                    Ok(0)
                }
            })
            .collect();
        Ok(hits?.iter().sum())
    }
}

/// Degree of a Gauss map at arbitrary points, evaluated as a reference degree
/// plus the winding number of the boundary image between the two points.
#[derive(Debug, Clone)]
pub struct DegreeField {
    boundary: SphereCurve,
    base: V3,
    base_degree: i32,
}

impl DegreeField {
    pub fn new(boundary: SphereCurve, base: V3, base_degree: i32) -> Self {
        Self { boundary, base, base_degree }
    }

    /// Smoothly sampled boundary image `N∘c` of an analytic chart, anchored at
    /// the antipode of the normal at `anchor`, whose degree is taken from the
    /// triangulated image.
    pub fn from_chart(chart: &ImmersedChart, boundary: &CurveInChart) -> Result<Self> {
        let lp = chart.framed_loop(boundary)?;
        let curve = SphereCurve::new(lp.normal().to_vec())?;
        let image = GaussImage::from_chart(chart)?;
        let mean: V3 = chart.vertex_normals().iter().sum();
        let mut base = -mean.normalize();
        let mut jitter = 0;
        let base_degree = loop {
            match image.degree_at(&base) {
                Ok(d) => break d,
                Err(Error::NotRegularValue) if jitter < 8 => {
                    jitter += 1;
                    base = (base + V3::new(1e-6, -2e-6, 3e-6) * jitter as f64).normalize();
                }
                Err(e) => return Err(e),
            }
        };
        Ok(Self::new(curve, base, base_degree))
    }

    pub fn boundary(&self) -> &SphereCurve {
        &self.boundary
    }

    pub fn query(&self, p: &V3) -> Result<i32> {
        if p.dot(&self.base) >= -0.5 {
            return Ok(self.base_degree + winding_number(&self.boundary, p, &self.base)?);
        }
        // no unique short arc to the base; go through an intermediate point
        // about 73° from the base, trying another if it lands on the curve
        let mut last = None;
        for t in [V3::new(1.0, 0.3271, 0.1415), V3::new(0.2718, 1.0, 0.1618), V3::new(0.1732, 0.4142, 1.0)] {
            let side = self.base.cross(&t);
            if side.norm() < 0.1 {
                continue;
            }
            let m = (side.normalize() + self.base * 0.3).normalize();
            match winding_number(&self.boundary, p, &m).and_then(|a| Ok(a + winding_number(&self.boundary, &m, &self.base)?)) {
                Ok(w) => return Ok(self.base_degree + w),
                Err(e @ Error::DegenerateConfiguration(_)) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.unwrap_or_else(|| Error::DegenerateConfiguration("no intermediate point".into())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::meshgen::disc;
    use crate::geometry::{ElementRule, Graph, Polynomial, Sphere};
    use std::sync::Arc;

    #[test]
    fn bowl_image_has_degree_one_inside() {
        let m = Arc::new(disc(1.0, 12).unwrap());
        let chart = ImmersedChart::from_surface(m, Graph { height: Polynomial::bowl(), scale: 1.0 }, ElementRule::Barycenter).unwrap();
        let img = GaussImage::from_chart(&chart).unwrap();
        // normal of the bowl at (0.3, 0.2)
        let p = V3::new(-0.3, -0.2, 1.0).normalize();
        assert_eq!(img.degree_at(&p).unwrap(), 1);
        assert_eq!(img.degree_at(&V3::new(1.0, 0.0, -1.0).normalize()).unwrap(), 0);
    }

    #[test]
    fn cap_degree_via_winding() {
        let m = Arc::new(disc(0.8, 10).unwrap());
        let chart = ImmersedChart::from_surface(m, Sphere { radius: 1.0 }, ElementRule::Barycenter).unwrap();
        let f = DegreeField::from_chart(&chart, &CurveInChart::circle(crate::numerics::V2::zeros(), 0.8, 256)).unwrap();
        assert_eq!(f.query(&V3::z()).unwrap(), 1);
        assert_eq!(f.query(&V3::new(1.0, 0.0, 0.1).normalize()).unwrap(), 0);
    }
}
