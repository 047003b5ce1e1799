use crate::error::{Error, Result};
use crate::numerics::{unit_angle, V3};
use crate::tolerances::{scaled, GEO_DELTA, ORTH};

/// Closed spherical polygon; consecutive vertices are joined by the shorter
/// great-circle arc.
#[derive(Debug, Clone)]
pub struct SphereCurve {
    points: Vec<V3>,
}

impl SphereCurve {
    pub fn new(points: Vec<V3>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidLoop("spherical curve needs at least 2 points".into()));
        }
        for (k, p) in points.iter().enumerate() {
            if (p.norm() - 1.0).abs() > scaled(ORTH) {
                return Err(Error::InvalidLoop(format!("point {k} is not on the unit sphere")));
            }
            let q = points[(k + 1) % points.len()];
            if (p + q).norm() < 1e-12 {
                return Err(Error::InvalidLoop(format!("points {k} and successor are antipodal")));
            }
        }
        Ok(Self { points })
    }

    /// Normalises the input points first.
    pub fn from_directions(points: impl IntoIterator<Item = V3>) -> Result<Self> {
        Self::new(points.into_iter().map(|p| p.normalize()).collect())
    }

    /// Great circle `z = 0` traversed `turns` times counter-clockwise about `+z`.
    pub fn equator(n: usize, turns: usize) -> Self {
        let m = n * turns;
        Self {
            points: (0..m)
                .map(|k| {
                    let t = std::f64::consts::TAU * k as f64 / n as f64;
                    V3::new(t.cos(), t.sin(), 0.0)
                })
                .collect(),
        }
    }

    pub fn points(&self) -> &[V3] {
        &self.points
    }

    pub fn length(&self) -> f64 {
        let n = self.points.len();
        (0..n).map(|k| unit_angle(&self.points[k], &self.points[(k + 1) % n])).sum()
    }

    pub fn segments(&self) -> impl Iterator<Item = (V3, V3)> + '_ {
        let n = self.points.len();
        (0..n).map(move |k| (self.points[k], self.points[(k + 1) % n]))
    }
}

fn det(a: &V3, b: &V3, c: &V3) -> f64 {
    a.dot(&b.cross(c))
}

/// Signed crossing of the short arcs `ab` and `cd`: `+1` when `c` lies to the
/// left of `ab` (`det(a, b, c) > 0`), `0` if they do not cross.
pub(crate) fn arc_crossing(a: &V3, b: &V3, c: &V3, d: &V3) -> Result<i32> {
    let acb = -det(a, b, c);
    let bda = det(a, b, d);
    let cbd = -det(c, d, b);
    let dac = det(c, d, a);
    let delta = scaled(GEO_DELTA);
    if [acb, bda, cbd, dac].iter().any(|x| x.abs() < delta) {
        // a point on the other great circle only matters if it sits on the arc
        let near = (acb.abs() < delta && within(c, a, b, delta))
            || (bda.abs() < delta && within(d, a, b, delta))
            || (cbd.abs() < delta && within(b, c, d, delta))
            || (dac.abs() < delta && within(a, c, d, delta));
        if near {
            return Err(Error::DegenerateConfiguration(format!(
                "arc crossing within {delta:e} of tangency"
            )));
        }
        return Ok(0);
    }
    if acb.signum() == bda.signum() && bda.signum() == cbd.signum() && cbd.signum() == dac.signum() {
        Ok(if det(a, b, c) > 0.0 { -1 } else { 1 })
    } else {
        Ok(0)
    }
}

/// Whether `x` (close to the great circle of `ab`) lies on the short arc `ab`.
fn within(x: &V3, a: &V3, b: &V3, delta: f64) -> bool {
    let n = a.cross(b);
    x.dot(&(a + b)) > 0.0 && a.cross(x).dot(&n) >= -delta && x.cross(b).dot(&n) >= -delta
}

/// Signed number of crossings of the curve with the short geodesic from `p`
/// to `q`. A crossing counts `+1` when `p` lies to the left of the curve, so
/// that for a Gauss map `Q(p) − Q(q) = w(p, q)`.
pub fn winding_number(curve: &SphereCurve, p: &V3, q: &V3) -> Result<i32> {
    if (p + q).norm() < scaled(GEO_DELTA) {
        return Err(Error::DegenerateConfiguration("p and q are antipodal".into()));
    }
    let mut w = 0;
    for (a, b) in curve.segments() {
        // arc from q to p: p to the left of ab means det(a, b, p) > 0
        w += arc_crossing(&a, &b, q, p)?;
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equator_separates_poles() {
        let e = SphereCurve::equator(64, 1);
        let n = V3::new(0.01, 0.0, 1.0).normalize();
        let s = V3::new(0.0, 0.013, -1.0).normalize();
        assert_eq!(winding_number(&e, &n, &s).unwrap(), 1);
        assert_eq!(winding_number(&e, &s, &n).unwrap(), -1);
        let a = V3::new(0.3, 0.1, 0.9).normalize();
        assert_eq!(winding_number(&e, &n, &a).unwrap(), 0);
        let d = SphereCurve::equator(64, 2);
        assert_eq!(winding_number(&d, &n, &s).unwrap(), 2);
        assert!((d.length() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn tangential_crossing_is_reported() {
        let e = SphereCurve::equator(4, 1);
        // arc through the vertex (1, 0, 0)
        let p = V3::new(1.0, 0.0, 0.5).normalize();
        let q = V3::new(1.0, 0.0, -0.5).normalize();
        assert!(matches!(winding_number(&e, &p, &q), Err(Error::DegenerateConfiguration(_))));
    }
}
