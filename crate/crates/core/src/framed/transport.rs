use std::f64::consts::TAU;

use rustfft::num_complex::Complex64;
use serde::Serialize;

use super::frame_loop::{FramedLoop, Sampling};
use crate::error::{Error, Result};
use crate::geometry::{CurveInChart, MetricField};
use crate::numerics::{
    cumulative_integral, map_components2, map_components3, modulated_period_integral, periodic_antiderivative, spectral_derivative,
    spectral_resample, V2, V3,
};
use crate::tolerances::{scaled, ORTH};

/// Burgers vector relative to a base sample, in the frame `(t, n, N)` there.
#[derive(Debug, Clone, Serialize)]
pub struct BurgersResult {
    pub vector: [f64; 3],
    pub magnitude: f64,
    pub base: usize,
    /// The same vector from the dual formula `∫⟨ℒ, N'⟩ N`, when available.
    pub dual: Option<[f64; 3]>,
    /// `|B − B_dual|`, zero when no dual value was computed.
    pub route_gap: f64,
}

const REFINE: usize = 4;

/// `∫ speed·e^{iΘ} dφ` over one period with `Θ' = ω`, `Θ(0) = 0`.
///
/// `Θ` splits into a linear part and a periodic part; the periodic factor is
/// integrated mode by mode against the linear phase. Returns the integral and
/// `Θ(2π)`.
pub fn burgers_from_turning(omega: &[f64], speed: &[f64]) -> (Complex64, f64) {
    let n = omega.len();
    let (theta, total) = periodic_antiderivative(omega);
    let nu = total / TAU;
    let p: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(speed[j], theta[j] - nu * TAU * j as f64 / n as f64))
        .collect();
    (modulated_period_integral(&p, nu), total)
}

fn in_frame(lp: &FramedLoop, k: usize, v: V3) -> [f64; 3] {
    let t = lp.tangent()[k];
    let nn = lp.normal()[k];
    let n = nn.cross(&t);
    [v.dot(&t), v.dot(&n), v.dot(&nn)]
}

fn frame_norm(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Burgers vector of a framed loop relative to sample `base`, computed both
/// by transporting the velocity to the base point and by the dual formula.
pub fn burgers_vector(lp: &FramedLoop, base: usize) -> Result<BurgersResult> {
    let lp = lp.rebased(base);
    let (primal, dual) = match lp.sampling() {
        Sampling::Spectral => smooth_routes(&lp),
        Sampling::Polyline => polyline_routes(&lp),
    };
    let dual = in_frame(&lp, 0, dual);
    let gap = ((primal[0] - dual[0]).powi(2) + (primal[1] - dual[1]).powi(2) + dual[2].powi(2)).sqrt();
    Ok(BurgersResult {
        vector: primal,
        magnitude: frame_norm(&primal),
        base,
        dual: Some(dual),
        route_gap: gap,
    })
}

fn smooth_routes(lp: &FramedLoop) -> ([f64; 3], V3) {
    let n = lp.len();
    let omega: Vec<f64> = lp.turning_increments().iter().map(|a| a / lp.step()).collect();
    let (b, _) = burgers_from_turning(&omega, &lp.speed());
    let primal = [b.re, b.im, 0.0];

    // dual route on the refined grid
    let m = REFINE * n;
    let h = TAU / m as f64;
    let fine = lp.refined(m).expect("refinement of a valid loop");
    let omega_f: Vec<f64> = fine.turning_increments().iter().map(|a| a / h).collect();
    let speed_f = fine.speed();
    let (theta, total) = periodic_antiderivative(&omega_f);
    let dn = map_components3(fine.normal(), spectral_derivative);
    let conormal = fine.conormal();
    // C(φ) = ∫_0^φ |γ'| e^{iΘ}
    let mut re: Vec<f64> = (0..m).map(|j| speed_f[j] * theta[j].cos()).collect();
    let mut im: Vec<f64> = (0..m).map(|j| speed_f[j] * theta[j].sin()).collect();
    re.push(speed_f[0] * total.cos());
    im.push(speed_f[0] * total.sin());
    let c1 = cumulative_integral(&re, h);
    let c2 = cumulative_integral(&im, h);
    let (c1_end, c2_end) = (c1[m], c2[m]);
    let mut integrand = vec![V3::zeros(); m + 1];
    for (j, slot) in integrand.iter_mut().enumerate() {
        let k = j % m;
        let th = if j == m { total } else { theta[k] };
        let (t, nrm) = (fine.tangent()[k], conormal[k]);
        let e1 = t * th.cos() - nrm * th.sin();
        let e2 = t * th.sin() + nrm * th.cos();
        let l = e1 * (c1_end - c1[j]) + e2 * (c2_end - c2[j]);
        *slot = fine.normal()[k] * l.dot(&dn[k]);
    }
    let dual = V3::from_fn(|i, _| {
        let comp: Vec<f64> = integrand.iter().map(|v| v[i]).collect();
        *cumulative_integral(&comp, h).last().unwrap()
    });
    (primal, dual)
}

fn polyline_routes(lp: &FramedLoop) -> ([f64; 3], V3) {
    let n = lp.len();
    let tau = lp.turning_increments();
    let g = lp.gamma();
    // direction of chord k measured in the transported base frame
    let mut theta = Vec::with_capacity(n);
    let mut acc = 0.5 * tau[0];
    for k in 0..n {
        if k > 0 {
            acc += tau[k];
        }
        theta.push(acc);
    }
    let chord_len: Vec<f64> = (0..n).map(|k| (g[(k + 1) % n] - g[k]).norm()).collect();
    let mut partial = vec![Complex64::new(0.0, 0.0); n + 1];
    for k in 0..n {
        partial[k + 1] = partial[k] + Complex64::from_polar(chord_len[k], theta[k]);
    }
    let total = partial[n];
    let primal = [total.re, total.im, 0.0];

    // parallel frame at vertex k: angle −(τ_1 + … + τ_k) from (t_k, n_k)
    let conormal = lp.conormal();
    let mut lvec = Vec::with_capacity(n + 1);
    let mut ang = 0.0;
    for k in 0..n {
        if k > 0 {
            ang += tau[k];
        }
        let (t, nrm) = (lp.tangent()[k], conormal[k]);
        let e1 = t * ang.cos() - nrm * ang.sin();
        let e2 = t * ang.sin() + nrm * ang.cos();
        let rest = total - partial[k];
        lvec.push(e1 * rest.re + e2 * rest.im);
    }
    lvec.push(V3::zeros());
    let nn = lp.normal();
    let mut dual = V3::zeros();
    for k in 0..n {
        let (a, b) = (nn[k], nn[(k + 1) % n]);
        let mid = (a + b).normalize();
        let l = (lvec[k] + lvec[k + 1]) * 0.5;
        dual += mid * l.dot(&(b - a));
    }
    (primal, dual)
}

impl FramedLoop {
    /// Transports `v ⟂ N(from)` backwards along the loop to sample `to` by
    /// RK4 on `X' = −⟨X, N'⟩N`. Polylines rotate by the discrete turning.
    pub fn parallel_transport(&self, from: usize, to: usize, v: V3) -> Result<V3> {
        let n = self.len();
        let nf = self.normal()[from];
        if v.dot(&nf).abs() > scaled(ORTH) * v.norm().max(1.0) {
            return Err(Error::NotTangent(v.dot(&nf)));
        }
        let steps = (from + n - to) % n;
        if self.sampling() == Sampling::Polyline {
            let t = self.tangent()[from];
            let nrm = nf.cross(&t);
            let tau = self.turning_increments();
            let mut ang = v.dot(&nrm).atan2(v.dot(&t));
            if steps > 0 {
                // vertex tangents bisect the chords, so the end vertices count half
                ang += 0.5 * (tau[from] + tau[to]);
                for s in 1..steps {
                    ang += tau[(from + n - s) % n];
                }
            }
            let k = to;
            let t = self.tangent()[k];
            let nrm = self.normal()[k].cross(&t);
            return Ok((t * ang.cos() + nrm * ang.sin()) * v.norm());
        }
        let nn = map_components3(self.normal(), |x| spectral_resample(x, 2 * n));
        let dn = map_components3(&nn, spectral_derivative);
        let h = self.step();
        let rhs = |j: usize, x: &V3| -> V3 {
            let j = j % (2 * n);
            -nn[j] * x.dot(&dn[j])
        };
        // walk backwards on the doubled grid: sample k sits at index 2k
        let mut x = v;
        let mut j = 2 * from + 2 * n;
        for _ in 0..steps {
            let k1 = rhs(j, &x);
            let k2 = rhs(j - 1, &(x - k1 * (0.5 * h)));
            let k3 = rhs(j - 1, &(x - k2 * (0.5 * h)));
            let k4 = rhs(j - 2, &(x - k3 * h));
            x -= (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            j -= 2;
        }
        Ok(x)
    }

    /// Parallel frame `E₁` obtained by RK4 transport of `t(0)` forwards.
    pub fn parallel_frame(&self) -> Vec<V3> {
        let n = self.len();
        let nn = map_components3(self.normal(), |x| spectral_resample(x, 2 * n));
        let dn = map_components3(&nn, spectral_derivative);
        let h = self.step();
        let rhs = |j: usize, x: &V3| -> V3 {
            let j = j % (2 * n);
            -nn[j] * x.dot(&dn[j])
        };
        let mut out = Vec::with_capacity(n);
        let mut x = self.tangent()[0];
        for k in 0..n {
            out.push(x);
            let j = 2 * k;
            let k1 = rhs(j, &x);
            let k2 = rhs(j + 1, &(x + k1 * (0.5 * h)));
            let k3 = rhs(j + 1, &(x + k2 * (0.5 * h)));
            let k4 = rhs(j + 2, &(x + k3 * h));
            x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
        out
    }
}

/// Burgers vector of a closed chart curve using only the metric: the
/// transport angle is the accumulated geodesic curvature.
pub fn burgers_intrinsic(metric: &MetricField, curve: &CurveInChart) -> Result<BurgersResult> {
    if !curve.is_smooth() {
        return Err(Error::InvalidLoop("intrinsic transport needs a smooth sampled curve".into()));
    }
    let omega = turning_density(metric, curve);
    let speed: Vec<f64> = curve
        .points()
        .iter()
        .zip(curve.velocity())
        .map(|(p, v)| metric.norm_sq(*p, v).sqrt())
        .collect();
    let (b, _) = burgers_from_turning(&omega, &speed);
    Ok(BurgersResult { vector: [b.re, b.im, 0.0], magnitude: b.norm(), base: 0, dual: None, route_gap: 0.0 })
}

/// `κ_g |c'|_g` along a smooth chart curve, from the Christoffel symbols.
pub(crate) fn turning_density(metric: &MetricField, curve: &CurveInChart) -> Vec<f64> {
    let vel = curve.velocity();
    let acc = map_components2(&vel, spectral_derivative);
    curve
        .points()
        .iter()
        .zip(vel.iter().zip(&acc))
        .map(|(p, (v, a))| {
            let gam = metric.christoffel(*p);
            let cov = V2::from_fn(|k, _| a[k] + (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| gam[k][i][j] * v[i] * v[j]).sum::<f64>());
            let speed_sq = metric.norm_sq(*p, *v);
            metric.sqrt_det(*p) * v.perp(&cov) / speed_sq
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::frame_loop::tests::{cap_boundary, planar_circle};
    use super::*;
    use crate::geometry::{ConeMetric, DipoleMetric};
    use approx::assert_relative_eq;

    #[test]
    fn planar_circle_has_no_burgers_vector() {
        let b = burgers_vector(&planar_circle(128, 1.0), 0).unwrap();
        assert!(b.magnitude < 1e-12 && b.route_gap < 1e-12, "{b:?}");
    }

    #[test]
    fn cap_burgers_matches_closed_form() {
        // cap boundary: ω = cos θ₀, speed = sin θ₀
        let th = 0.8f64;
        let b = burgers_vector(&cap_boundary(256, th), 5).unwrap();
        let c = th.cos();
        let expected = th.sin() * (2.0 - 2.0 * (TAU * c).cos()).sqrt() / c;
        assert_relative_eq!(b.magnitude, expected, max_relative = 1e-9);
        assert!(b.route_gap < 1e-9 * expected, "{}", b.route_gap);
    }

    #[test]
    fn rk4_transport_agrees_with_angle_form() {
        let lp = cap_boundary(256, 0.6);
        let v = lp.tangent()[100] * 2.0;
        let x = lp.parallel_transport(100, 0, v).unwrap();
        let c = 0.6f64.cos();
        let ang = c * 100.0 * lp.step();
        let t0 = lp.tangent()[0];
        let n0 = lp.normal()[0].cross(&t0);
        let expect = (t0 * ang.cos() + n0 * ang.sin()) * 2.0;
        assert!((x - expect).norm() < 1e-9, "{}", (x - expect).norm());
        assert_relative_eq!(x.norm(), 2.0, max_relative = 1e-8);
    }

    #[test]
    fn transport_rejects_normal_vectors() {
        let lp = cap_boundary(64, 0.6);
        assert!(matches!(lp.parallel_transport(3, 0, lp.normal()[3]), Err(Error::NotTangent(_))));
    }

    #[test]
    fn intrinsic_cone_and_dipole() {
        let c = 0.75;
        let g = MetricField::analytic(ConeMetric { c }, &[]).unwrap();
        let r = 0.3;
        let b = burgers_intrinsic(&g, &CurveInChart::circle(V2::zeros(), r, 256)).unwrap();
        assert_relative_eq!(b.magnitude, 2.0 * r * (std::f64::consts::PI * c).sin().abs(), max_relative = 1e-10);
        let eps = 0.01;
        let g = MetricField::analytic(DipoleMetric { epsilon: eps }, &[]).unwrap();
        let b = burgers_intrinsic(&g, &CurveInChart::circle(V2::zeros(), 0.5, 256)).unwrap();
        assert_relative_eq!(b.magnitude, eps, max_relative = 1e-9);
    }
}
