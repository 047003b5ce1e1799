//! Numerical tolerances shared by all checks.
//!
//! `WB_TOL_SCALE` multiplies every tolerance returned by [`scaled`]; it is
//! read on first use and fixed for the rest of the process.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Pointwise curvature identities on analytic charts.
pub const CURV_ANALYTIC: f64 = 1e-6;
/// Pointwise curvature identities on meshed charts (finest level).
pub const CURV_MESHED: f64 = 1e-2;
/// Gauss–Bonnet and enclosed-curvature consistency on meshes.
pub const GAUSS_BONNET: f64 = 1e-2;
/// Orthogonality of frames and normals.
pub const ORTH: f64 = 1e-8;
/// Burgers vectors and transport on analytic loops.
pub const BURGERS_ANALYTIC: f64 = 1e-6;
/// Burgers vectors on loops extracted from meshes.
pub const BURGERS_MESHED: f64 = 1e-3;
/// Relative slack allowed on every lower-bound inequality.
pub const INEQ: f64 = 1e-3;
/// A-posteriori flux through inner boundaries, relative to the charge scale.
pub const FLUX: f64 = 1e-2;
/// Coarea residual relative to the area integral.
pub const COAREA: f64 = 1e-2;
/// Angular distance below which a point counts as lying on a spherical curve.
pub const GEO_DELTA: f64 = 1e-9;
/// Jitter used when retrying a degenerate winding-number query.
pub const GEO_JITTER: f64 = 1e-6;
/// Relative residual of the conjugate-gradient solver.
pub const CG_RESIDUAL: f64 = 1e-10;
/// Critical-level exclusion relative to the range of the potential.
pub const GRAD_FLOOR: f64 = 1e-6;

/// Parsed `WB_TOL_SCALE`: `Ok(1.0)` when unset, an error when it is not a
/// positive finite number.
pub fn scale_from_env() -> Result<f64> {
    match std::env::var("WB_TOL_SCALE") {
        Err(_) => Ok(1.0),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
            _ => Err(Error::Config(format!("WB_TOL_SCALE must be a positive number, got {s:?}"))),
        },
    }
}

/// Value of the `WB_TOL_SCALE` environment variable, or 1 when unset or invalid.
pub fn scale() -> f64 {
    static SCALE: OnceLock<f64> = OnceLock::new();
    *SCALE.get_or_init(|| scale_from_env().unwrap_or(1.0))
}

pub fn scaled(tol: f64) -> f64 {
    tol * scale()
}
