//! Small numerical kernels: trigonometric (spectral) operations on uniformly
//! sampled periodic data, fourth-order quadrature on uniform grids,
//! Gauss–Legendre rules and least-squares line fits.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::{Vector2, Vector3};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

pub type V2 = Vector2<f64>;
pub type V3 = Vector3<f64>;

fn forward(samples: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

fn inverse_real(mut coeffs: Vec<Complex64>) -> Vec<f64> {
    let n = coeffs.len();
    FftPlanner::new().plan_fft_inverse(n).process(&mut coeffs);
    coeffs.iter().map(|c| c.re / n as f64).collect()
}

/// Signed wavenumber of FFT bin `j` out of `n`; the Nyquist bin maps to `None`.
fn wavenumber(j: usize, n: usize) -> Option<f64> {
    if 2 * j == n {
        None
    } else if 2 * j < n {
        Some(j as f64)
    } else {
        Some(j as f64 - n as f64)
    }
}

/// Derivative with respect to φ of data sampled at φ_j = 2πj/n.
pub fn spectral_derivative(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    let mut c = forward(samples);
    for (j, cj) in c.iter_mut().enumerate() {
        *cj = match wavenumber(j, n) {
            Some(k) => *cj * Complex64::new(0.0, k),
            None => Complex64::new(0.0, 0.0),
        };
    }
    inverse_real(c)
}

/// Trigonometric interpolation of `samples` onto `m >= n` uniform points.
pub fn spectral_resample(samples: &[f64], m: usize) -> Vec<f64> {
    let n = samples.len();
    assert!(m >= n, "spectral_resample only refines");
    if m == n {
        return samples.to_vec();
    }
    let c = forward(samples);
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    let scale = m as f64 / n as f64;
    for (j, cj) in c.iter().enumerate() {
        match wavenumber(j, n) {
            Some(k) if k >= 0.0 => out[k as usize] += cj * scale,
            Some(k) => out[(m as f64 + k) as usize] += cj * scale,
            None => {
                // split the Nyquist mode symmetrically
                let half = cj * (0.5 * scale);
                out[n / 2] += half;
                out[m - n / 2] += half;
            }
        }
    }
    inverse_real(out)
}

/// Values F(φ_j) = ∫_0^{φ_j} f for f sampled at φ_j = 2πj/n, together with
/// the full-period integral.
pub fn periodic_antiderivative(samples: &[f64]) -> (Vec<f64>, f64) {
    let n = samples.len();
    let c = forward(samples);
    let mean = c[0].re / n as f64;
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    for (j, cj) in c.iter().enumerate().skip(1) {
        if let Some(k) = wavenumber(j, n) {
            d[j] = cj / Complex64::new(0.0, k);
        }
    }
    let g = inverse_real(d);
    let g0 = g[0];
    let values = g
        .iter()
        .enumerate()
        .map(|(j, gj)| mean * 2.0 * PI * j as f64 / n as f64 + gj - g0)
        .collect();
    (values, 2.0 * PI * mean)
}

/// `∫_0^{2π} p(φ) e^{iνφ} dφ` for periodic complex `p` sampled uniformly.
///
/// `p` is expanded in its trigonometric interpolant and each mode is
/// integrated exactly, so the result is spectrally accurate for any real `ν`.
pub fn modulated_period_integral(p: &[Complex64], nu: f64) -> Complex64 {
    let n = p.len();
    let mut c = p.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut c);
    let exact = |k: f64| -> Complex64 {
        let w = k + nu;
        if w.abs() < 1e-12 {
            Complex64::new(2.0 * PI, 0.0)
        } else {
            (Complex64::from_polar(1.0, 2.0 * PI * w) - 1.0) / Complex64::new(0.0, w)
        }
    };
    let mut total = Complex64::new(0.0, 0.0);
    for (j, cj) in c.iter().enumerate() {
        let a = cj / n as f64;
        total += match wavenumber(j, n) {
            Some(k) => a * exact(k),
            None => a * 0.5 * (exact(n as f64 / 2.0) + exact(-(n as f64) / 2.0)),
        };
    }
    total
}

/// Applies a scalar spectral operation component-wise to 3-vectors.
pub fn map_components3(samples: &[V3], op: impl Fn(&[f64]) -> Vec<f64>) -> Vec<V3> {
    let cols: Vec<Vec<f64>> = (0..3)
        .map(|i| op(&samples.iter().map(|v| v[i]).collect::<Vec<_>>()))
        .collect();
    (0..cols[0].len())
        .map(|j| V3::new(cols[0][j], cols[1][j], cols[2][j]))
        .collect()
}

pub fn map_components2(samples: &[V2], op: impl Fn(&[f64]) -> Vec<f64>) -> Vec<V2> {
    let cols: Vec<Vec<f64>> = (0..2)
        .map(|i| op(&samples.iter().map(|v| v[i]).collect::<Vec<_>>()))
        .collect();
    (0..cols[0].len())
        .map(|j| V2::new(cols[0][j], cols[1][j]))
        .collect()
}

/// Fourth-order cumulative integral of values on a uniform grid with spacing
/// `h` (nodes include both endpoints). Needs at least four nodes.
pub fn cumulative_integral(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 4, "cumulative_integral needs at least 4 nodes");
    let f = values;
    let mut out = vec![0.0; n];
    for i in 0..n - 1 {
        let piece = if i == 0 {
            9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]
        } else if i == n - 2 {
            f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1]
        } else {
            -f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]
        };
        out[i + 1] = out[i] + piece * h / 24.0;
    }
    out
}

/// Fourth-order definite integral on a uniform grid.
pub fn integral(values: &[f64], h: f64) -> f64 {
    *cumulative_integral(values, h).last().unwrap()
}

/// Trapezoid rule on a non-uniform grid.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Gauss–Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(n).expect("at least one node"));
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    rule.as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (mid + half * x, half * w))
        .collect()
}

/// Least-squares fit `y ≈ slope·x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Angle between two unit vectors, accurate for nearly parallel inputs.
pub fn unit_angle(a: &V3, b: &V3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect()
    }

    #[test]
    fn derivative_of_trig_polynomial_is_exact() {
        let phi = grid(64);
        let f: Vec<f64> = phi.iter().map(|p| (3.0 * p).sin() + 0.5 * p.cos()).collect();
        let df = spectral_derivative(&f);
        for (p, d) in phi.iter().zip(&df) {
            assert_abs_diff_eq!(*d, 3.0 * (3.0 * p).cos() - 0.5 * p.sin(), epsilon = 1e-12);
        }
    }

    #[test]
    fn resample_reproduces_band_limited_data() {
        let f: Vec<f64> = grid(16).iter().map(|p| (2.0 * p).cos() + 1.0).collect();
        let g = spectral_resample(&f, 40);
        for (p, v) in grid(40).iter().zip(&g) {
            assert_abs_diff_eq!(*v, (2.0 * p).cos() + 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn antiderivative_includes_the_mean() {
        let phi = grid(32);
        let f: Vec<f64> = phi.iter().map(|p| 2.0 + p.cos()).collect();
        let (big_f, total) = periodic_antiderivative(&f);
        assert_abs_diff_eq!(total, 4.0 * PI, epsilon = 1e-12);
        for (p, v) in phi.iter().zip(&big_f) {
            assert_abs_diff_eq!(*v, 2.0 * p + p.sin(), epsilon = 1e-12);
        }
    }

    #[test]
    fn fourth_order_quadrature() {
        let n = 101;
        let h = 1.0 / (n - 1) as f64;
        let v: Vec<f64> = (0..n).map(|i| (i as f64 * h).exp()).collect();
        assert_abs_diff_eq!(integral(&v, h), 1f64.exp() - 1.0, epsilon = 1e-9);
        let c = cumulative_integral(&v, h);
        assert_abs_diff_eq!(c[50], 0.5f64.exp() - 1.0, epsilon = 1e-9);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let s: f64 = gauss_legendre(4, 0.0, 2.0).iter().map(|(x, w)| w * x.powi(7)).sum();
        assert_abs_diff_eq!(s, 256.0 / 8.0, epsilon = 1e-10);
    }
}
