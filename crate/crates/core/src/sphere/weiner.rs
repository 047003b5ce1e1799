use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::winding::{winding_number, SphereCurve};
use crate::error::{Error, Result};
use crate::numerics::V3;
use crate::tolerances::{scaled, GEO_JITTER};

/// Spherical isoperimetric check `L² ≥ ½∬w²` with a Monte-Carlo right side.
#[derive(Debug, Clone, Serialize)]
pub struct WeinerReport {
    pub lhs: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub n_mc: usize,
    pub holds: bool,
}

const CHUNK: usize = 4096;

fn uniform_point(rng: &mut ChaCha8Rng) -> V3 {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let t: f64 = rng.gen_range(0.0..TAU);
    let s = (1.0 - z * z).sqrt();
    V3::new(s * t.cos(), s * t.sin(), z)
}

fn jittered(rng: &mut ChaCha8Rng, p: V3) -> V3 {
    let d = scaled(GEO_JITTER);
    (p + V3::new(rng.gen_range(-d..d), rng.gen_range(-d..d), rng.gen_range(-d..d))).normalize()
}

/// Estimates `½∬ w(p, q)² dp dq = 8π² E[w²]` from `n_mc` uniform pairs.
///
/// Pairs are drawn in fixed-size chunks, each from its own stream of a
/// seeded generator, so the result does not depend on thread scheduling.
pub fn weiner_check(curve: &SphereCurve, n_mc: usize, seed: u64) -> Result<WeinerReport> {
    let chunks = n_mc.div_ceil(CHUNK);
    let partial: Result<Vec<(f64, f64)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = CHUNK.min(n_mc - c * CHUNK);
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                let (mut p, mut q) = (uniform_point(&mut rng), uniform_point(&mut rng));
                let mut tries = 0;
                let w = loop {
                    match winding_number(curve, &p, &q) {
                        Ok(w) => break w as f64,
                        Err(Error::DegenerateConfiguration(_)) if tries < 16 => {
                            tries += 1;
                            p = jittered(&mut rng, p);
                            q = jittered(&mut rng, q);
                        }
                        Err(e) => return Err(e),
                    }
                };
                s1 += w * w;
                s2 += w * w * w * w;
            }
            Ok((s1, s2))
        })
        .collect();
    let (s1, s2) = partial?.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = n_mc as f64;
    let mean = s1 / n;
    let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
    let scale = 8.0 * PI * PI;
    let estimate = scale * mean;
    let stderr = scale * (var / n).sqrt();
    let l = curve.length();
    Ok(WeinerReport { lhs: l * l, estimate, stderr, n_mc, holds: l * l >= estimate - 3.0 * stderr })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equator_estimate() {
        let r = weiner_check(&SphereCurve::equator(256, 1), 20_000, 7).unwrap();
        assert!((r.estimate - 4.0 * PI * PI).abs() < 4.0 * r.stderr, "{r:?}");
        assert!(r.holds);
    }

    #[test]
    fn deterministic_given_seed() {
        let c = SphereCurve::equator(64, 1);
        let a = weiner_check(&c, 9000, 3).unwrap();
        let b = weiner_check(&c, 9000, 3).unwrap();
        assert_eq!(a.estimate, b.estimate);
    }
}
