use std::f64::consts::TAU;

use super::metric::MetricField;
use crate::error::{Error, Result};
use crate::numerics::{map_components2, spectral_derivative, V2};

/// A closed curve in chart coordinates, sampled at uniform parameter values.
///
/// Smooth curves are differentiated spectrally; polylines by differences.
#[derive(Debug, Clone)]
pub struct CurveInChart {
    points: Vec<V2>,
    smooth: bool,
}

impl CurveInChart {
    pub fn circle(centre: V2, radius: f64, n: usize) -> Self {
        let points = (0..n)
            .map(|j| {
                let t = TAU * j as f64 / n as f64;
                centre + V2::new(radius * t.cos(), radius * t.sin())
            })
            .collect();
        Self { points, smooth: true }
    }

    pub fn from_samples(points: Vec<V2>, smooth: bool) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidLoop("a closed curve needs at least 3 samples".into()));
        }
        for i in 0..points.len() {
            let j = (i + 1) % points.len();
            if (points[i] - points[j]).norm() == 0.0 {
                return Err(Error::InvalidLoop(format!("samples {i} and {j} coincide")));
            }
        }
        Ok(Self { points, smooth })
    }

    pub fn points(&self) -> &[V2] {
        &self.points
    }
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
    pub fn is_smooth(&self) -> bool {
        self.smooth
    }

    /// Derivative with respect to a parameter running over `[0, 2π)`.
    pub fn velocity(&self) -> Vec<V2> {
        let n = self.points.len();
        if self.smooth {
            return map_components2(&self.points, spectral_derivative);
        }
        let h = TAU / n as f64;
        (0..n)
            .map(|i| (self.points[(i + 1) % n] - self.points[(i + n - 1) % n]) / (2.0 * h))
            .collect()
    }

    /// Length measured in the given metric.
    pub fn length(&self, metric: &MetricField) -> f64 {
        let n = self.points.len();
        if self.smooth {
            let v = self.velocity();
            let h = TAU / n as f64;
            return (0..n).map(|i| metric.norm_sq(self.points[i], v[i]).sqrt() * h).sum();
        }
        (0..n)
            .map(|i| {
                let (a, b) = (self.points[i], self.points[(i + 1) % n]);
                metric.norm_sq((a + b) * 0.5, b - a).sqrt()
            })
            .sum()
    }

    pub fn winding_around(&self, p: V2) -> i32 {
        winding_number(&self.points, p)
    }
}

/// Winding number of a closed polygon around `p`.
pub fn winding_number(poly: &[V2], p: V2) -> i32 {
    let n = poly.len();
    let mut w = 0;
    for i in 0..n {
        let (a, b) = (poly[i] - p, poly[(i + 1) % n] - p);
        if a.y <= 0.0 {
            if b.y > 0.0 && a.perp(&b) > 0.0 {
                w += 1;
            }
        } else if b.y <= 0.0 && a.perp(&b) < 0.0 {
            w -= 1;
        }
    }
    w
}
