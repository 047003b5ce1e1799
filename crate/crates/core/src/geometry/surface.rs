use num_dual::{Dual, HyperDual64};

use super::metric::MetricFormula;
use super::Scalar;
use crate::error::{Error, Result};
use crate::numerics::{V2, V3};

/// An immersion of a planar chart into ℝ³ given in closed form.
pub trait Surface: Send + Sync {
    fn position<D: Scalar>(&self, x: D, y: D) -> [D; 3];
}

/// Position and first/second partial derivatives at a chart point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceJet {
    pub f: V3,
    pub fx: V3,
    pub fy: V3,
    pub fxx: V3,
    pub fxy: V3,
    pub fyy: V3,
}

pub fn surface_jet<S: Surface + ?Sized>(s: &S, p: V2) -> SurfaceJet {
    let eval = |dx: [f64; 2], dy: [f64; 2]| {
        s.position(HyperDual64::new(p.x, dx[0], dx[1], 0.0), HyperDual64::new(p.y, dy[0], dy[1], 0.0))
    };
    let m = eval([1.0, 0.0], [0.0, 1.0]);
    let xx = eval([1.0, 1.0], [0.0, 0.0]);
    let yy = eval([0.0, 0.0], [1.0, 1.0]);
    let v = |c: &[HyperDual64; 3], f: fn(&HyperDual64) -> f64| V3::new(f(&c[0]), f(&c[1]), f(&c[2]));
    SurfaceJet {
        f: v(&m, |h| h.re),
        fx: v(&m, |h| h.eps1),
        fy: v(&m, |h| h.eps2),
        fxx: v(&xx, |h| h.eps1eps2),
        fxy: v(&m, |h| h.eps1eps2),
        fyy: v(&yy, |h| h.eps1eps2),
    }
}

/// First fundamental form `df·df` of an analytic immersion.
#[derive(Debug, Clone)]
pub struct InducedMetric<S>(pub S);

impl<S: Surface> MetricFormula for InducedMetric<S> {
    fn components<D: Scalar>(&self, x: D, y: D) -> [D; 3] {
        let fx = self.0.position(Dual::new(x, D::one()), Dual::from_re(y));
        let fy = self.0.position(Dual::from_re(x), Dual::new(y, D::one()));
        let dot = |a: &[Dual<D>; 3], b: &[Dual<D>; 3]| a[0].eps * b[0].eps + a[1].eps * b[1].eps + a[2].eps * b[2].eps;
        [dot(&fx, &fx), dot(&fx, &fy), dot(&fy, &fy)]
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Plane;

impl Surface for Plane {
    fn position<D: Scalar>(&self, x: D, y: D) -> [D; 3] {
        [x, y, D::zero()]
    }
}

/// Round sphere in geodesic polar coordinates about the north pole: the chart
/// point `(x, y)` at distance `r` from the origin maps to colatitude `r`.
#[derive(Debug, Clone, Copy)]
pub struct Sphere {
    pub radius: f64,
}

/// `sin(√s)/√s` and `cos(√s)` as power series in `s`, smooth at `s = 0`.
fn sinc_cos<D: Scalar>(s: D) -> (D, D) {
    let (mut sinc, mut cos) = (D::zero(), D::zero());
    let (mut ts, mut tc) = (D::one(), D::one());
    for k in 0..20 {
        sinc += ts;
        cos += tc;
        let k = k as f64;
        ts = -(ts * s) / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
        tc = -(tc * s) / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
    }
    (sinc, cos)
}

impl Surface for Sphere {
    fn position<D: Scalar>(&self, x: D, y: D) -> [D; 3] {
        let (sinc, cos) = sinc_cos(x * x + y * y);
        let rho = self.radius;
        [x * sinc * rho, y * sinc * rho, cos * rho]
    }
}

/// Circular cylinder; `x` is arclength around the axis.
#[derive(Debug, Clone, Copy)]
pub struct Cylinder {
    pub radius: f64,
}

impl Surface for Cylinder {
    fn position<D: Scalar>(&self, x: D, y: D) -> [D; 3] {
        let t = x / self.radius;
        [t.cos() * self.radius, t.sin() * self.radius, y]
    }
}

/// Right circular cone isometric to the cone metric with `c = 1 − α/2π`.
#[derive(Debug, Clone, Copy)]
pub struct ConeSurface {
    pub c: f64,
}

impl Surface for ConeSurface {
    fn position<D: Scalar>(&self, x: D, y: D) -> [D; 3] {
        let r = (x * x + y * y).sqrt();
        [x * self.c, y * self.c, r * (1.0 - self.c * self.c).sqrt()]
    }
}

/// Planar `m`-fold cover `r·(cos mφ, sin mφ, 0)` of an annulus.
#[derive(Debug, Clone, Copy)]
pub struct ECone {
    pub m: u32,
}

impl Surface for ECone {
    fn position<D: Scalar>(&self, x: D, y: D) -> [D; 3] {
        let (mut re, mut im) = (D::one(), D::zero());
        for _ in 0..self.m {
            let t = re * x - im * y;
            im = re * y + im * x;
            re = t;
        }
        let r = (x * x + y * y).sqrt();
        let scale = r.powi(1 - self.m as i32);
        [re * scale, im * scale, D::zero()]
    }
}

/// Scalar height field over the chart.
pub trait HeightFunction: Send + Sync {
    fn value<D: Scalar>(&self, x: D, y: D) -> D;
}

/// Polynomial `Σ c·xⁱyʲ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub terms: Vec<(u32, u32, f64)>,
}

impl Polynomial {
    pub fn bowl() -> Self {
        Self { terms: vec![(2, 0, 0.5), (0, 2, 0.5)] }
    }
    pub fn saddle() -> Self {
        Self { terms: vec![(2, 0, 0.5), (0, 2, -0.5)] }
    }

    /// Parses sums of monomials such as `0.5*x^2 - 1.5*x*y + y^3`.
    /// Fractional or negative exponents are rejected as not twice
    /// differentiable on the closed disc.
    pub fn parse(src: &str) -> Result<Self> {
        let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut terms = Vec::new();
        let mut rest = s.as_str();
        while !rest.is_empty() {
            let (sign, body) = match rest.as_bytes()[0] {
                b'+' => (1.0, &rest[1..]),
                b'-' => (-1.0, &rest[1..]),
                _ => (1.0, rest),
            };
            // next top-level sign, skipping exponent signs and 1e-3 style numbers
            let b = body.as_bytes();
            let end = (1..b.len())
                .find(|&i| (b[i] == b'+' || b[i] == b'-') && !matches!(b[i - 1], b'^' | b'e' | b'E'))
                .unwrap_or(b.len());
            terms.push(Self::monomial(&body[..end], sign, src)?);
            rest = &body[end..];
        }
        Ok(Self { terms })
    }

    fn monomial(term: &str, sign: f64, src: &str) -> Result<(u32, u32, f64)> {
        let (mut i, mut j, mut c) = (0u32, 0u32, sign);
        if term.is_empty() {
            return Err(Error::Parse(format!("empty term in {src:?}")));
        }
        for factor in term.split('*') {
            let (base, exp) = match factor.split_once('^') {
                Some((b, e)) => (b, Some(e)),
                None => (factor, None),
            };
            let power = match exp {
                None => 1,
                Some(e) => {
                    let v: f64 = e.parse().map_err(|_| Error::Parse(format!("bad exponent {e:?} in {src:?}")))?;
                    if v < 0.0 || v.fract() != 0.0 {
                        return Err(Error::NotC2(format!("exponent {e} in {src:?}")));
                    }
                    v as u32
                }
            };
            match base {
                "x" => i += power,
                "y" => j += power,
                num => {
                    let v: f64 = num.parse().map_err(|_| Error::Parse(format!("unknown factor {num:?} in {src:?}")))?;
                    c *= v.powi(power as i32);
                }
            }
        }
        Ok((i, j, c))
    }

    /// Hessian `[u_xx, u_xy, u_yy]`.
    pub fn hessian(&self, x: f64, y: f64) -> [f64; 3] {
        let mono = |i: u32, j: u32| if i == 0 && j == 0 { 1.0 } else { x.powi(i as i32) * y.powi(j as i32) };
        let mut h = [0.0; 3];
        for &(i, j, c) in &self.terms {
            let (fi, fj) = (i as f64, j as f64);
            if i >= 2 {
                h[0] += c * fi * (fi - 1.0) * mono(i - 2, j);
            }
            if i >= 1 && j >= 1 {
                h[1] += c * fi * fj * mono(i - 1, j - 1);
            }
            if j >= 2 {
                h[2] += c * fj * (fj - 1.0) * mono(i, j - 2);
            }
        }
        h
    }
}

impl std::fmt::Display for Polynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, &(i, j, c)) in self.terms.iter().enumerate() {
            match (k, c < 0.0) {
                (0, false) => write!(f, "{c}")?,
                (0, true) => write!(f, "-{}", -c)?,
                (_, false) => write!(f, " + {c}")?,
                (_, true) => write!(f, " - {}", -c)?,
            }
            for (v, p) in [("x", i), ("y", j)] {
                match p {
                    0 => {}
                    1 => write!(f, "*{v}")?,
                    p => write!(f, "*{v}^{p}")?,
                }
            }
        }
        Ok(())
    }
}

impl HeightFunction for Polynomial {
    fn value<D: Scalar>(&self, x: D, y: D) -> D {
        self.terms
            .iter()
            .map(|&(i, j, c)| x.powi(i as i32) * y.powi(j as i32) * c)
            .fold(D::zero(), |a, b| a + b)
    }
}

/// Graph `(x, y, scale·h(x, y))`.
#[derive(Debug, Clone)]
pub struct Graph<H> {
    pub height: H,
    pub scale: f64,
}

impl<H: HeightFunction> Surface for Graph<H> {
    fn position<D: Scalar>(&self, x: D, y: D) -> [D; 3] {
        [x, y, self.height.value(x, y) * self.scale]
    }
}

/// Isometric immersion of the dipole annulus: its developing map
/// `D = r e^{iφ} + i aφ/2 + a e^{2iφ}/4` (`a = ε/π`, monodromy `iε`) wrapped
/// `k` times around a cylinder of circumference `ε/k` so it closes up.
#[derive(Debug, Clone, Copy)]
pub struct DipoleWrap {
    pub epsilon: f64,
    pub k: u32,
}

impl DipoleWrap {
    pub fn developing_map<D: Scalar>(&self, x: D, y: D) -> (D, D) {
        let a = self.epsilon / std::f64::consts::PI;
        let phi = y.atan2(x);
        let (s, c) = (phi * 2.0).sin_cos();
        (x + c * (a / 4.0), y + phi * (a / 2.0) + s * (a / 4.0))
    }
}

impl Surface for DipoleWrap {
    fn position<D: Scalar>(&self, x: D, y: D) -> [D; 3] {
        let (u, v) = self.developing_map(x, y);
        let rc = self.epsilon / (2.0 * std::f64::consts::PI * self.k as f64);
        let t = v / rc;
        [u, t.cos() * rc, t.sin() * rc]
    }
}

pub(crate) fn position_f64<S: Surface + ?Sized>(s: &S, p: V2) -> V3 {
    let [a, b, c] = s.position(p.x, p.y);
    V3::new(a, b, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DipoleMetric, MetricField};
    use approx::assert_abs_diff_eq;

    fn induced<S: Surface + Clone + 'static>(s: &S, p: V2) -> nalgebra::Matrix2<f64> {
        MetricField::analytic(InducedMetric(s.clone()), &[p]).unwrap().eval(p)
    }

    #[test]
    fn polynomial_parse_roundtrip() {
        let p = Polynomial::parse("0.5*x^2 - 1.5*x*y + y^3 - 2").unwrap();
        assert_eq!(p.terms, vec![(2, 0, 0.5), (1, 1, -1.5), (0, 3, 1.0), (0, 0, -2.0)]);
        assert_eq!(Polynomial::parse(&p.to_string()).unwrap(), p);
        assert_eq!(Polynomial::parse("1e-3*x").unwrap().terms, vec![(1, 0, 1e-3)]);
        assert!(matches!(Polynomial::parse("x^1.5"), Err(Error::NotC2(_))));
        assert!(matches!(Polynomial::parse("y^-1"), Err(Error::NotC2(_))));
        assert!(matches!(Polynomial::parse("sin(x)"), Err(Error::Parse(_))));
    }

    #[test]
    fn polynomial_hessian_matches_jet() {
        let p = Polynomial::parse("0.3*x^3 - x*y^2 + 0.7*x^2*y + 2*y").unwrap();
        let q = V2::new(0.4, -0.3);
        let j = surface_jet(&Graph { height: p.clone(), scale: 1.0 }, q);
        let h = p.hessian(q.x, q.y);
        assert_abs_diff_eq!(h[0], j.fxx.z, epsilon = 1e-12);
        assert_abs_diff_eq!(h[1], j.fxy.z, epsilon = 1e-12);
        assert_abs_diff_eq!(h[2], j.fyy.z, epsilon = 1e-12);
    }

    #[test]
    fn sphere_chart_is_geodesic_polar() {
        let s = Sphere { radius: 2.0 };
        let p = V2::new(0.3, 0.4);
        let f = position_f64(&s, p);
        assert_abs_diff_eq!(f.norm(), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!((f.z / 2.0).acos(), 0.5, epsilon = 1e-14);
        let g = induced(&s, p);
        // radial direction has unit speed scaled by the radius
        let radial = p / p.norm();
        assert_abs_diff_eq!(radial.dot(&(g * radial)), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn dipole_wrap_is_isometric() {
        let w = DipoleWrap { epsilon: 0.05, k: 1 };
        let target = MetricField::analytic(DipoleMetric { epsilon: 0.05 }, &[]).unwrap();
        for p in [V2::new(0.5, 0.2), V2::new(-0.3, 0.7), V2::new(-0.8, -1e-3), V2::new(-0.8, 1e-3)] {
            let g = induced(&w, p);
            assert!((g - target.eval(p)).norm() < 1e-12, "{p:?}");
        }
        // continuous across the branch cut of atan2
        let a = position_f64(&w, V2::new(-0.8, -1e-9));
        let b = position_f64(&w, V2::new(-0.8, 1e-9));
        assert!((a - b).norm() < 1e-6);
    }

    #[test]
    fn jets_match_position_differences() {
        let s = Graph { height: Polynomial::saddle(), scale: 0.3 };
        let p = V2::new(0.2, -0.1);
        let j = surface_jet(&s, p);
        assert_abs_diff_eq!(j.fxx.z, 0.3, epsilon = 1e-14);
        assert_abs_diff_eq!(j.fyy.z, -0.3, epsilon = 1e-14);
        assert_abs_diff_eq!(j.fxy.z, 0.0, epsilon = 1e-14);
        let e = ECone { m: 3 };
        let je = surface_jet(&e, V2::new(0.6, 0.8));
        assert_abs_diff_eq!(je.f.norm(), 1.0, epsilon = 1e-14);
    }
}
