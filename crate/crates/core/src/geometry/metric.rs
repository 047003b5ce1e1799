use std::sync::Arc;

use nalgebra::Matrix2;
use num_dual::HyperDual64;

use super::{lift, Scalar};
use crate::error::{Error, Result};
use crate::numerics::V2;

pub type Sym2 = Matrix2<f64>;

/// A metric given in closed form as `(g11, g12, g22)` over chart coordinates.
pub trait MetricFormula: Send + Sync {
    fn components<D: Scalar>(&self, x: D, y: D) -> [D; 3];
}

/// Value and first/second partial derivatives of a metric at a point.
/// `dg[i] = ∂_i g`, `ddg[i][j] = ∂_i ∂_j g`.
#[derive(Debug, Clone, Copy)]
pub struct MetricJet {
    pub g: Sym2,
    pub dg: [Sym2; 2],
    pub ddg: [[Sym2; 2]; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeMode {
    Analytic,
    FiniteDifference { step: f64 },
}

trait MetricEval: Send + Sync {
    fn eval(&self, p: V2) -> Sym2;
    fn jet(&self, _p: V2) -> Option<MetricJet> {
        None
    }
}

struct Analytic<M>(M);

fn sym(c: [f64; 3]) -> Sym2 {
    Sym2::new(c[0], c[1], c[1], c[2])
}

impl<M: MetricFormula> MetricEval for Analytic<M> {
    fn eval(&self, p: V2) -> Sym2 {
        sym(self.0.components(p.x, p.y))
    }

    fn jet(&self, p: V2) -> Option<MetricJet> {
        let hd = |x: f64, y: f64, dx: [f64; 2], dy: [f64; 2]| {
            let xs = HyperDual64::new(x, dx[0], dx[1], 0.0);
            let ys = HyperDual64::new(y, dy[0], dy[1], 0.0);
            self.0.components(xs, ys)
        };
        let mixed = hd(p.x, p.y, [1.0, 0.0], [0.0, 1.0]);
        let xx = hd(p.x, p.y, [1.0, 1.0], [0.0, 0.0]);
        let yy = hd(p.x, p.y, [0.0, 0.0], [1.0, 1.0]);
        let pick = |c: &[HyperDual64; 3], f: fn(&HyperDual64) -> f64| sym([f(&c[0]), f(&c[1]), f(&c[2])]);
        let dxy = pick(&mixed, |h| h.eps1eps2);
        Some(MetricJet {
            g: pick(&mixed, |h| h.re),
            dg: [pick(&mixed, |h| h.eps1), pick(&mixed, |h| h.eps2)],
            ddg: [[pick(&xx, |h| h.eps1eps2), dxy], [dxy, pick(&yy, |h| h.eps1eps2)]],
        })
    }
}

struct Sampled<F>(F);

impl<F: Fn(V2) -> Sym2 + Send + Sync> MetricEval for Sampled<F> {
    fn eval(&self, p: V2) -> Sym2 {
        (self.0)(p)
    }
}

/// A symmetric positive-definite metric over a planar chart.
///
/// Eigenvalue bounds are recorded at construction over the supplied sample
/// points; construction fails if the metric is not SPD at any of them.
#[derive(Clone)]
pub struct MetricField {
    inner: Arc<dyn MetricEval>,
    mode: DerivativeMode,
    eig_min: f64,
    eig_max: f64,
}

impl std::fmt::Debug for MetricField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MetricField")
            .field("mode", &self.mode)
            .field("eig_min", &self.eig_min)
            .field("eig_max", &self.eig_max)
            .finish()
    }
}

fn eigenvalues(g: &Sym2) -> (f64, f64) {
    let tr = g[(0, 0)] + g[(1, 1)];
    let det = g.determinant();
    let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
    (0.5 * tr - disc, 0.5 * tr + disc)
}

impl MetricField {
    fn build(inner: Arc<dyn MetricEval>, mode: DerivativeMode, samples: &[V2]) -> Result<Self> {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for p in samples {
            let g = inner.eval(*p);
            let (a, b) = eigenvalues(&g);
            if !(a > 0.0) || !a.is_finite() || !b.is_finite() || (g[(0, 1)] - g[(1, 0)]).abs() > 1e-12 * b {
                return Err(Error::NonSpdMetric { x: p.x, y: p.y });
            }
            lo = lo.min(a);
            hi = hi.max(b);
        }
        if samples.is_empty() {
            lo = f64::NAN;
            hi = f64::NAN;
        }
        Ok(Self { inner, mode, eig_min: lo, eig_max: hi })
    }

    /// Closed-form metric with exact derivatives.
    pub fn analytic<M: MetricFormula + 'static>(formula: M, samples: &[V2]) -> Result<Self> {
        Self::build(Arc::new(Analytic(formula)), DerivativeMode::Analytic, samples)
    }

    /// Metric known only pointwise; derivatives by central differences with
    /// step `(machine ε)^{1/3}` times the chart diameter.
    pub fn sampled<F>(f: F, diameter: f64, samples: &[V2]) -> Result<Self>
    where
        F: Fn(V2) -> Sym2 + Send + Sync + 'static,
    {
        let step = f64::EPSILON.cbrt() * diameter;
        Self::build(Arc::new(Sampled(f)), DerivativeMode::FiniteDifference { step }, samples)
    }

    pub fn euclidean() -> Self {
        Self::analytic(EuclideanMetric, &[V2::zeros()]).expect("identity is SPD")
    }

    pub fn mode(&self) -> DerivativeMode {
        self.mode
    }

    /// `(λ_min, λ_max)` over the construction samples.
    pub fn eigen_bounds(&self) -> (f64, f64) {
        (self.eig_min, self.eig_max)
    }

    pub fn eval(&self, p: V2) -> Sym2 {
        self.inner.eval(p)
    }

    pub fn sqrt_det(&self, p: V2) -> f64 {
        self.eval(p).determinant().sqrt()
    }

    /// Squared length of a chart vector.
    pub fn norm_sq(&self, p: V2, v: V2) -> f64 {
        v.dot(&(self.eval(p) * v))
    }

    pub fn jet(&self, p: V2) -> MetricJet {
        if let Some(j) = self.inner.jet(p) {
            return j;
        }
        let DerivativeMode::FiniteDifference { step } = self.mode else {
            unreachable!("analytic metrics always provide jets")
        };
        let e = [V2::new(1.0, 0.0), V2::new(0.0, 1.0)];
        let g = self.eval(p);
        let dg = [0, 1].map(|i| (self.eval(p + e[i] * step) - self.eval(p - e[i] * step)) / (2.0 * step));
        // second differences need a larger step: (ε)^{1/4} instead of (ε)^{1/3}
        let h = step * f64::EPSILON.powf(0.25 - 1.0 / 3.0);
        let mut ddg = [[Sym2::zeros(); 2]; 2];
        for i in 0..2 {
            ddg[i][i] = (self.eval(p + e[i] * h) - g * 2.0 + self.eval(p - e[i] * h)) / (h * h);
        }
        let cross = (self.eval(p + (e[0] + e[1]) * h) - self.eval(p + (e[0] - e[1]) * h)
            - self.eval(p + (e[1] - e[0]) * h)
            + self.eval(p - (e[0] + e[1]) * h))
            / (4.0 * h * h);
        ddg[0][1] = cross;
        ddg[1][0] = cross;
        MetricJet { g, dg, ddg }
    }

    /// Christoffel symbols `Γ[k][i][j]` of the second kind.
    pub fn christoffel(&self, p: V2) -> [[[f64; 2]; 2]; 2] {
        let MetricJet { g, dg, .. } = self.jet(p);
        let inv = g.try_inverse().expect("SPD metric is invertible");
        let mut out = [[[0.0; 2]; 2]; 2];
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    out[k][i][j] = (0..2)
                        .map(|l| 0.5 * inv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]))
                        .sum();
                }
            }
        }
        out
    }

    /// Gaussian curvature from the metric alone (Brioschi formula).
    pub fn gaussian_curvature(&self, p: V2) -> f64 {
        let MetricJet { g, dg, ddg } = self.jet(p);
        let (e, f, gg) = (g[(0, 0)], g[(0, 1)], g[(1, 1)]);
        let (e_u, e_v) = (dg[0][(0, 0)], dg[1][(0, 0)]);
        let (f_u, f_v) = (dg[0][(0, 1)], dg[1][(0, 1)]);
        let (g_u, g_v) = (dg[0][(1, 1)], dg[1][(1, 1)]);
        let e_vv = ddg[1][1][(0, 0)];
        let f_uv = ddg[0][1][(0, 1)];
        let g_uu = ddg[0][0][(1, 1)];
        let det3 = |m: [[f64; 3]; 3]| {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let a = det3([
            [-0.5 * e_vv + f_uv - 0.5 * g_uu, 0.5 * e_u, f_u - 0.5 * e_v],
            [f_v - 0.5 * g_u, e, f],
            [0.5 * g_v, f, gg],
        ]);
        let b = det3([[0.0, 0.5 * e_v, 0.5 * g_u], [0.5 * e_v, e, f], [0.5 * g_u, f, gg]]);
        let w = e * gg - f * f;
        (a - b) / (w * w)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EuclideanMetric;

impl MetricFormula for EuclideanMetric {
    fn components<D: Scalar>(&self, _x: D, _y: D) -> [D; 3] {
        [D::one(), D::zero(), D::one()]
    }
}

/// `g = I + (s² − 1)·t̂t̂ᵀ` where `t̂` is the unit angular direction, i.e. the
/// polar metric `dr² + (s·r)² dφ²` written in Cartesian chart coordinates.
fn polar_scaled<D: Scalar>(x: D, y: D, s: D) -> [D; 3] {
    let r2 = x * x + y * y;
    let k = (s * s - lift::<D>(1.0)) / r2;
    [D::one() + k * y * y, -(k * x * y), D::one() + k * x * x]
}

/// Cone metric `dr² + (c_α r)² dφ²` with `c_α = 1 − α/2π`.
#[derive(Debug, Clone, Copy)]
pub struct ConeMetric {
    pub c: f64,
}

impl ConeMetric {
    pub fn from_deficit(alpha: f64) -> Self {
        Self { c: 1.0 - alpha / (2.0 * std::f64::consts::PI) }
    }
}

impl MetricFormula for ConeMetric {
    fn components<D: Scalar>(&self, x: D, y: D) -> [D; 3] {
        polar_scaled(x, y, lift(self.c))
    }
}

/// Flat dipole metric `dr² + (r + (ε/π) cos φ)² dφ²`.
#[derive(Debug, Clone, Copy)]
pub struct DipoleMetric {
    pub epsilon: f64,
}

impl MetricFormula for DipoleMetric {
    fn components<D: Scalar>(&self, x: D, y: D) -> [D; 3] {
        let a = self.epsilon / std::f64::consts::PI;
        let s = D::one() + x * a / (x * x + y * y);
        polar_scaled(x, y, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cone_metric_eigenvalues() {
        let m = MetricField::analytic(ConeMetric::from_deficit(std::f64::consts::FRAC_PI_2), &[V2::new(0.3, 0.4)]).unwrap();
        let (lo, hi) = m.eigen_bounds();
        let r = 0.5;
        assert_abs_diff_eq!(lo, (0.75 * r / r) * 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, 1.0, epsilon = 1e-12);
        // g_φφ = (3r/4)² in polar form
        let p = V2::new(0.3, 0.4);
        let tang = V2::new(-p.y, p.x);
        assert_abs_diff_eq!(m.norm_sq(p, tang), (0.75 * r).powi(2), epsilon = 1e-12);
    }

    #[test]
    fn flat_metrics_have_zero_curvature() {
        let p = V2::new(0.21, -0.47);
        let cone = MetricField::analytic(ConeMetric { c: 0.6 }, &[p]).unwrap();
        let dip = MetricField::analytic(DipoleMetric { epsilon: 0.02 }, &[p]).unwrap();
        assert_abs_diff_eq!(cone.gaussian_curvature(p), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(dip.gaussian_curvature(p), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn finite_differences_match_analytic_jets() {
        let p = V2::new(0.4, 0.3);
        let exact = MetricField::analytic(DipoleMetric { epsilon: 0.1 }, &[p]).unwrap();
        let fd = MetricField::sampled(
            move |q| MetricField::analytic(DipoleMetric { epsilon: 0.1 }, &[]).unwrap().eval(q),
            2.0,
            &[p],
        )
        .unwrap();
        let (a, b) = (exact.jet(p), fd.jet(p));
        for i in 0..2 {
            assert!((a.dg[i] - b.dg[i]).norm() < 1e-8);
            for j in 0..2 {
                assert!((a.ddg[i][j] - b.ddg[i][j]).norm() < 1e-5);
            }
        }
    }

    #[test]
    fn rejects_indefinite_metric() {
        let bad = MetricField::sampled(|_| Sym2::new(1.0, 0.0, 0.0, -1.0), 1.0, &[V2::zeros()]);
        assert!(matches!(bad, Err(Error::NonSpdMetric { .. })));
    }
}
