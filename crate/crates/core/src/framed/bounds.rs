use std::f64::consts::{PI, TAU};

use serde::Serialize;

use super::frame_loop::FramedLoop;
use super::transport::{burgers_vector, BurgersResult};
use crate::error::Result;
use crate::tolerances::{scaled, INEQ};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IsoCase {
    Extendable,
    NonExtendable,
}

/// Squared normal turning against the enclosed-curvature isoperimetric term.
#[derive(Debug, Clone, Serialize)]
pub struct IsoCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub case: IsoCase,
    pub total_geodesic_curvature: f64,
    pub normal_turning: f64,
}

impl IsoCheck {
    /// `|lhs − rhs| / rhs`, or the absolute gap when `rhs` vanishes.
    pub fn relative_gap(&self) -> f64 {
        let d = (self.lhs - self.rhs).abs();
        if self.rhs.abs() > 1e-300 {
            d / self.rhs.abs()
        } else {
            d
        }
    }
}

/// `(4π − |x|)|x|`.
pub(crate) fn iso_rhs(x: f64) -> f64 {
    (4.0 * PI - x.abs()) * x.abs()
}

pub fn check_iso_inequality(lp: &FramedLoop) -> Result<IsoCheck> {
    let extendable = lp.is_extendable()?;
    let kg = lp.total_geodesic_curvature();
    let turning = lp.normal_turning();
    let (rhs, case) = if extendable {
        (iso_rhs(TAU - kg), IsoCase::Extendable)
    } else {
        (iso_rhs(kg), IsoCase::NonExtendable)
    };
    let lhs = turning * turning;
    Ok(IsoCheck {
        lhs,
        rhs,
        holds: lhs >= rhs - scaled(INEQ) * rhs.abs(),
        case,
        total_geodesic_curvature: kg,
        normal_turning: turning,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BurgersBoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub length: f64,
    pub burgers: BurgersResult,
}

/// Normal turning against `|B| / Length`.
pub fn check_burgers_bound(lp: &FramedLoop) -> Result<BurgersBoundCheck> {
    let burgers = burgers_vector(lp, 0)?;
    let length = lp.length();
    let lhs = lp.normal_turning();
    let rhs = burgers.magnitude / length;
    Ok(BurgersBoundCheck { lhs, rhs, holds: lhs >= rhs - scaled(INEQ) * rhs.abs(), length, burgers })
}

#[cfg(test)]
mod tests {
    use super::super::frame_loop::tests::{cap_boundary, planar_circle};
    use super::*;

    #[test]
    fn cap_is_an_equality_case() {
        for th in [0.3, 0.9, std::f64::consts::FRAC_PI_2] {
            let c = check_iso_inequality(&cap_boundary(1024, th)).unwrap();
            assert_eq!(c.case, IsoCase::Extendable);
            assert!(c.relative_gap() < 1e-10, "{th}: {c:?}");
            assert!(c.holds);
        }
    }

    #[test]
    fn doubled_circle_uses_the_non_extendable_form() {
        let c = check_iso_inequality(&planar_circle(128, 2.0)).unwrap();
        assert_eq!(c.case, IsoCase::NonExtendable);
        assert!(c.rhs.abs() < 1e-9 && c.lhs == 0.0 && c.holds);
    }

    #[test]
    fn burgers_bound_on_cap() {
        let c = check_burgers_bound(&cap_boundary(256, 0.5)).unwrap();
        assert!(c.holds && c.burgers.magnitude <= c.length);
    }
}
