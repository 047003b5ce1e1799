use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::numerics::{map_components3, spectral_derivative, spectral_resample, unit_angle, V3};
use crate::tolerances::{scaled, ORTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampling {
    /// Uniform samples of a smooth loop, differentiated spectrally.
    Spectral,
    /// Vertices of a polygon; derivatives become discrete turning angles.
    Polyline,
}

/// A closed curve `γ` with a unit normal `N ⟂ γ'`, sampled at `φ_k = 2πk/K`.
#[derive(Debug, Clone)]
pub struct FramedLoop {
    gamma: Vec<V3>,
    normal: Vec<V3>,
    velocity: Vec<V3>,
    tangent: Vec<V3>,
    sampling: Sampling,
}

fn check_unit_normals(normal: &[V3]) -> Result<()> {
    for (k, n) in normal.iter().enumerate() {
        if (n.norm() - 1.0).abs() > scaled(ORTH) {
            return Err(Error::InvalidLoop(format!("normal {k} has length {}", n.norm())));
        }
    }
    Ok(())
}

impl FramedLoop {
    /// Uniformly sampled smooth loop.
    pub fn new(gamma: Vec<V3>, normal: Vec<V3>) -> Result<Self> {
        if gamma.len() != normal.len() || gamma.len() < 8 {
            return Err(Error::InvalidLoop(format!(
                "need matching gamma/normal with at least 8 samples, got {} and {}",
                gamma.len(),
                normal.len()
            )));
        }
        check_unit_normals(&normal)?;
        let velocity = map_components3(&gamma, spectral_derivative);
        let mut tangent = Vec::with_capacity(gamma.len());
        for (k, (v, n)) in velocity.iter().zip(&normal).enumerate() {
            let speed = v.norm();
            if !(speed > 0.0) {
                return Err(Error::InvalidLoop(format!("zero speed at sample {k}")));
            }
            let t = v / speed;
            if t.dot(n).abs() > scaled(ORTH) {
                return Err(Error::NotTangent(t.dot(n)));
            }
            tangent.push(t);
        }
        Ok(Self { gamma, normal, velocity, tangent, sampling: Sampling::Spectral })
    }

    /// Smooth loop sampled at arbitrary increasing parameters in `[φ_0, φ_0 + 2π)`.
    /// Non-uniform samples are interpolated onto a uniform grid first.
    pub fn with_parameters(phi: &[f64], gamma: Vec<V3>, normal: Vec<V3>) -> Result<Self> {
        let n = phi.len();
        if n != gamma.len() || n != normal.len() || n < 8 {
            return Err(Error::InvalidLoop("phi, gamma and normal must have equal length ≥ 8".into()));
        }
        if phi.windows(2).any(|w| !(w[1] > w[0])) || phi[n - 1] - phi[0] >= TAU {
            return Err(Error::InvalidLoop("phi must increase within one period".into()));
        }
        let h = TAU / n as f64;
        let uniform = phi.iter().enumerate().all(|(k, p)| (p - phi[0] - k as f64 * h).abs() < 1e-9);
        if uniform {
            return Self::new(gamma, normal);
        }
        check_unit_normals(&normal)?;
        let m = n.max(256);
        let mut g = Vec::with_capacity(m);
        let mut nn = Vec::with_capacity(m);
        for j in 0..m {
            let t = phi[0] + TAU * j as f64 / m as f64;
            g.push(hermite(phi, &gamma, t));
            nn.push(hermite(phi, &normal, t));
        }
        let vel = map_components3(&g, spectral_derivative);
        let nn = nn
            .iter()
            .zip(&vel)
            .map(|(n, v)| {
                let t = v.normalize();
                (n - t * t.dot(n)).normalize()
            })
            .collect();
        Self::new(g, nn)
    }

    /// Closed polygon with normals at the vertices; the normals are
    /// re-orthogonalised against the central chord direction.
    pub fn polyline(gamma: Vec<V3>, normal: Vec<V3>) -> Result<Self> {
        let n = gamma.len();
        if n != normal.len() || n < 3 {
            return Err(Error::InvalidLoop("polyline needs ≥ 3 vertices with normals".into()));
        }
        let mut tangent = Vec::with_capacity(n);
        let mut velocity = Vec::with_capacity(n);
        let mut normals = Vec::with_capacity(n);
        let h = TAU / n as f64;
        for k in 0..n {
            let chord = gamma[(k + 1) % n] - gamma[(k + n - 1) % n];
            if chord.norm() == 0.0 {
                return Err(Error::InvalidLoop(format!("degenerate chord at vertex {k}")));
            }
            let t = chord.normalize();
            let m = normal[k] - t * t.dot(&normal[k]);
            if m.norm() < 1e-12 {
                return Err(Error::NotTangent(1.0));
            }
            tangent.push(t);
            velocity.push(chord / (2.0 * h));
            normals.push(m.normalize());
        }
        Ok(Self { gamma, normal: normals, velocity, tangent, sampling: Sampling::Polyline })
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }
    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }
    pub fn sampling(&self) -> Sampling {
        self.sampling
    }
    pub fn step(&self) -> f64 {
        TAU / self.len() as f64
    }
    pub fn gamma(&self) -> &[V3] {
        &self.gamma
    }
    pub fn normal(&self) -> &[V3] {
        &self.normal
    }
    pub fn velocity(&self) -> &[V3] {
        &self.velocity
    }
    pub fn tangent(&self) -> &[V3] {
        &self.tangent
    }
    /// In-surface normal `n = N × t`.
    pub fn conormal(&self) -> Vec<V3> {
        self.normal.iter().zip(&self.tangent).map(|(n, t)| n.cross(t)).collect()
    }
    pub fn speed(&self) -> Vec<f64> {
        self.velocity.iter().map(|v| v.norm()).collect()
    }

    fn chords(&self) -> impl Iterator<Item = V3> + '_ {
        let n = self.len();
        (0..n).map(move |k| self.gamma[(k + 1) % n] - self.gamma[k])
    }

    pub fn length(&self) -> f64 {
        match self.sampling {
            Sampling::Spectral => self.speed().iter().sum::<f64>() * self.step(),
            Sampling::Polyline => self.chords().map(|c| c.norm()).sum(),
        }
    }

    /// Geodesic curvature `⟨t', n⟩/|γ'|` per sample (smooth loops), or the
    /// turning angle at each vertex divided by the adjacent half-lengths.
    pub fn geodesic_curvature(&self) -> Vec<f64> {
        let inc = self.turning_increments();
        match self.sampling {
            Sampling::Spectral => inc.iter().zip(self.speed()).map(|(a, s)| a / (s * self.step())).collect(),
            Sampling::Polyline => {
                let c: Vec<f64> = self.chords().map(|c| c.norm()).collect();
                let n = self.len();
                (0..n).map(|k| inc[k] / (0.5 * (c[k] + c[(k + n - 1) % n]))).collect()
            }
        }
    }

    /// Per-sample contributions to `∫⟨t', n⟩ dφ`. For polylines these are the
    /// signed turning angles of consecutive chords about `N`.
    pub fn turning_increments(&self) -> Vec<f64> {
        match self.sampling {
            Sampling::Spectral => {
                let dt = map_components3(&self.tangent, spectral_derivative);
                let h = self.step();
                dt.iter().zip(self.conormal()).map(|(d, n)| d.dot(&n) * h).collect()
            }
            Sampling::Polyline => {
                let n = self.len();
                let c: Vec<V3> = self.chords().collect();
                (0..n)
                    .map(|k| {
                        let nk = self.normal[k];
                        let a = c[(k + n - 1) % n];
                        let b = c[k];
                        let a = a - nk * nk.dot(&a);
                        let b = b - nk * nk.dot(&b);
                        nk.dot(&a.cross(&b)).atan2(a.dot(&b))
                    })
                    .collect()
            }
        }
    }

    pub fn total_geodesic_curvature(&self) -> f64 {
        self.turning_increments().iter().sum()
    }

    /// Length of the normal's trace on the sphere, `∫|D_s N| dℓ`.
    pub fn normal_turning(&self) -> f64 {
        match self.sampling {
            Sampling::Spectral => {
                let dn = map_components3(&self.normal, spectral_derivative);
                dn.iter().map(|d| d.norm()).sum::<f64>() * self.step()
            }
            Sampling::Polyline => {
                let n = self.len();
                (0..n).map(|k| unit_angle(&self.normal[k], &self.normal[(k + 1) % n])).sum()
            }
        }
    }

    /// Trigonometric refinement to `m` samples (smooth loops only).
    pub fn refined(&self, m: usize) -> Result<Self> {
        if self.sampling == Sampling::Polyline || m <= self.len() {
            return Ok(self.clone());
        }
        let g = map_components3(&self.gamma, |x| spectral_resample(x, m));
        let nn = map_components3(&self.normal, |x| spectral_resample(x, m));
        let vel = map_components3(&g, spectral_derivative);
        let nn = nn
            .iter()
            .zip(&vel)
            .map(|(n, v)| {
                let t = v.normalize();
                (n - t * t.dot(n)).normalize()
            })
            .collect();
        Self::new(g, nn)
    }

    /// The same loop with sample `k` as the starting point.
    pub fn rebased(&self, k: usize) -> Self {
        let mut out = self.clone();
        for v in [&mut out.gamma, &mut out.normal, &mut out.velocity, &mut out.tangent] {
            v.rotate_left(k % self.len());
        }
        out
    }
}

/// Periodic cubic Hermite (Catmull–Rom) interpolation of samples at `phi`.
fn hermite(phi: &[f64], vals: &[V3], t: f64) -> V3 {
    let n = phi.len();
    let period = |k: isize| -> (f64, V3) {
        let m = k.rem_euclid(n as isize) as usize;
        let shift = TAU * k.div_euclid(n as isize) as f64;
        (phi[m] + shift, vals[m])
    };
    let mut t = t;
    while t >= phi[0] + TAU {
        t -= TAU;
    }
    let i = match phi.iter().rposition(|&p| p <= t) {
        Some(i) => i as isize,
        None => -1,
    };
    let (x0, p0) = period(i - 1);
    let (x1, p1) = period(i);
    let (x2, p2) = period(i + 1);
    let (x3, p3) = period(i + 2);
    let m1 = (p2 - p0) / (x2 - x0);
    let m2 = (p3 - p1) / (x3 - x1);
    let h = x2 - x1;
    let s = (t - x1) / h;
    let (s2, s3) = (s * s, s * s * s);
    p1 * (2.0 * s3 - 3.0 * s2 + 1.0) + m1 * (h * (s3 - 2.0 * s2 + s)) + p2 * (-2.0 * s3 + 3.0 * s2)
        + m2 * (h * (s3 - s2))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use approx::assert_relative_eq;

    pub fn planar_circle(n: usize, turns: f64) -> FramedLoop {
        let g = (0..n)
            .map(|k| {
                let t = turns * TAU * k as f64 / n as f64;
                V3::new(t.cos(), t.sin(), 0.0)
            })
            .collect();
        FramedLoop::new(g, vec![V3::z(); n]).unwrap()
    }

    /// Boundary of the spherical cap of colatitude `theta0` on the unit sphere.
    pub fn cap_boundary(n: usize, theta0: f64) -> FramedLoop {
        let (s, c) = theta0.sin_cos();
        let g: Vec<V3> = (0..n)
            .map(|k| {
                let t = TAU * k as f64 / n as f64;
                V3::new(s * t.cos(), s * t.sin(), c)
            })
            .collect();
        FramedLoop::new(g.clone(), g).unwrap()
    }

    #[test]
    fn circle_quantities() {
        let l = planar_circle(64, 1.0);
        assert_relative_eq!(l.total_geodesic_curvature(), TAU, epsilon = 1e-12);
        assert_relative_eq!(l.length(), TAU, epsilon = 1e-12);
        assert_eq!(l.normal_turning(), 0.0);
        for k in l.geodesic_curvature() {
            assert_relative_eq!(k, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn cap_boundary_quantities() {
        let th = 0.7f64;
        let l = cap_boundary(128, th);
        assert_relative_eq!(l.total_geodesic_curvature(), TAU * th.cos(), epsilon = 1e-12);
        assert_relative_eq!(l.normal_turning(), TAU * th.sin(), epsilon = 1e-12);
        for k in l.geodesic_curvature() {
            assert_relative_eq!(k, th.cos() / th.sin(), epsilon = 1e-9);
        }
    }

    #[test]
    fn polyline_converges_to_smooth_values() {
        let th = 0.9f64;
        let smooth = cap_boundary(400, th);
        let poly = FramedLoop::polyline(smooth.gamma().to_vec(), smooth.normal().to_vec()).unwrap();
        assert!((poly.total_geodesic_curvature() - TAU * th.cos()).abs() < 1e-3);
        assert!((poly.normal_turning() - TAU * th.sin()).abs() < 1e-3);
    }

    #[test]
    fn rejects_non_tangent_normals() {
        let g: Vec<V3> = (0..16).map(|k| V3::new((k as f64).cos(), 0.0, 0.0)).collect();
        let n = vec![V3::x(); 16];
        assert!(FramedLoop::new(g, n).is_err());
    }

    #[test]
    fn nonuniform_parameters_are_resampled() {
        let th = 0.5f64;
        let n = 300;
        let phi: Vec<f64> = (0..n).map(|k| {
            let u = TAU * k as f64 / n as f64;
            u + 0.3 * u.sin()
        }).collect();
        let (s, c) = th.sin_cos();
        let g: Vec<V3> = phi.iter().map(|t| V3::new(s * t.cos(), s * t.sin(), c)).collect();
        let l = FramedLoop::with_parameters(&phi, g.clone(), g).unwrap();
        assert!((l.total_geodesic_curvature() - TAU * c).abs() < 1e-4);
    }
}
