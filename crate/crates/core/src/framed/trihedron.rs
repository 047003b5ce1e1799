use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Matrix3, Rotation3, UnitQuaternion, Vector4};

use super::frame_loop::{FramedLoop, Sampling};
use crate::error::{Error, Result};

/// The moving trihedron `(t, n, N)` as a path in SO(3) with a continuous
/// quaternion lift.
#[derive(Debug, Clone)]
pub struct TrihedronPath {
    pub rotations: Vec<Matrix3<f64>>,
    pub lift: Vec<Vector4<f64>>,
    /// `true` if continuing the lift once around the loop returns `−q₀`.
    pub antiperiodic: bool,
}

impl TrihedronPath {
    pub fn build(lp: &FramedLoop) -> Result<Self> {
        let lp = match lp.sampling() {
            Sampling::Spectral => {
                let turning = rough_turning(lp);
                let need = 256usize.max(32 * (turning / PI).ceil() as usize);
                lp.refined(need)?
            }
            Sampling::Polyline => lp.clone(),
        };
        let n = lp.len();
        let conormal = lp.conormal();
        let mut rotations = Vec::with_capacity(n);
        let mut lift: Vec<Vector4<f64>> = Vec::with_capacity(n);
        for k in 0..n {
            let m = Matrix3::from_columns(&[lp.tangent()[k], conormal[k], lp.normal()[k]]);
            let q = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(m));
            let mut v = q.into_inner().coords;
            if let Some(prev) = lift.last() {
                if v.dot(prev) < 0.0 {
                    v = -v;
                }
                check_step(prev, &v, k - 1, k)?;
            }
            rotations.push(m);
            lift.push(v);
        }
        let closing = lift[n - 1].dot(&lift[0]);
        check_step(&lift[n - 1], &(lift[0] * closing.signum()), n - 1, 0)?;
        Ok(Self { rotations, lift, antiperiodic: closing < 0.0 })
    }
}

/// Rotation angle between consecutive frames must stay below π/2.
fn check_step(a: &Vector4<f64>, b: &Vector4<f64>, index: usize, next: usize) -> Result<()> {
    let angle = 2.0 * a.dot(b).abs().min(1.0).acos();
    if angle >= FRAC_PI_2 {
        return Err(Error::SamplingTooCoarse { index, next, angle });
    }
    Ok(())
}

/// Total rotation of the frame estimated from the current samples.
fn rough_turning(lp: &FramedLoop) -> f64 {
    let n = lp.len();
    let c = lp.conormal();
    (0..n)
        .map(|k| {
            let j = (k + 1) % n;
            let a = Matrix3::from_columns(&[lp.tangent()[k], c[k], lp.normal()[k]]);
            let b = Matrix3::from_columns(&[lp.tangent()[j], c[j], lp.normal()[j]]);
            let r = a.transpose() * b;
            ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0).acos()
        })
        .sum()
}

impl FramedLoop {
    pub fn trihedron(&self) -> Result<TrihedronPath> {
        TrihedronPath::build(self)
    }

    /// A framed loop bounds an immersed disc iff its trihedron path is the
    /// non-trivial class of π₁(SO(3)), i.e. the quaternion lift flips sign.
    pub fn is_extendable(&self) -> Result<bool> {
        Ok(self.trihedron()?.antiperiodic)
    }
}

#[cfg(test)]
mod tests {
    use super::super::frame_loop::tests::{cap_boundary, planar_circle};
    use super::*;
    use crate::numerics::V3;
    use std::f64::consts::TAU;

    #[test]
    fn single_circle_is_extendable() {
        assert!(planar_circle(64, 1.0).is_extendable().unwrap());
        assert!(cap_boundary(64, 1.0).is_extendable().unwrap());
    }

    #[test]
    fn doubled_circle_is_not() {
        let l = planar_circle(64, 2.0);
        let t = l.trihedron().unwrap();
        assert!(!t.antiperiodic);
        for r in &t.rotations {
            assert!((r.determinant() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn coarse_polyline_is_rejected() {
        let g: Vec<V3> = (0..3)
            .map(|k| {
                let t = TAU * k as f64 / 3.0;
                V3::new(t.cos(), t.sin(), 0.0)
            })
            .collect();
        let l = FramedLoop::polyline(g, vec![V3::z(); 3]).unwrap();
        assert!(matches!(l.is_extendable(), Err(Error::SamplingTooCoarse { .. })));
    }

    #[test]
    fn extendability_survives_refinement_and_rebasing() {
        let l = cap_boundary(40, 0.4);
        for m in [40, 97, 300] {
            assert!(l.refined(m).unwrap().is_extendable().unwrap());
        }
        assert!(l.rebased(13).is_extendable().unwrap());
    }
}
