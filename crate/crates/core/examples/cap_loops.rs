//! The framed-loop isoperimetric inequality along spherical caps, where it is
//! an equality, the Burgers vector of one cap and Weiner's identity on the
//! equator.

use std::f64::consts::PI;

use willmore::framed::{burgers_vector, check_iso_inequality};
use willmore::scenarios::cap::cap_loop;
use willmore::sphere::{weiner_check, SphereCurve};

fn main() -> willmore::Result<()> {
    println!("{:>8} {:>14} {:>14} {:>10}  extendable", "theta0", "lhs", "rhs", "gap");
    for k in 1..=6 {
        let theta0 = k as f64 * PI / 12.0;
        let lp = cap_loop(1024, theta0, 1.0)?;
        let iso = check_iso_inequality(&lp)?;
        println!("{theta0:>8.4} {:>14.8} {:>14.8} {:>10.2e}  {}", iso.lhs, iso.rhs, iso.relative_gap(), lp.is_extendable()?);
    }

    let lp = cap_loop(1024, PI / 3.0, 1.0)?;
    let b = burgers_vector(&lp, 0)?;
    println!("Burgers vector on the pi/3 cap: {:?}, |B| = {:.3e}", b.vector, b.magnitude);

    let w = weiner_check(&SphereCurve::equator(512, 1), 200_000, 1)?;
    println!("Weiner on the equator: {:.6} vs Monte Carlo {:.6} +- {:.1e}", w.lhs, w.estimate, w.stderr);
    Ok(())
}
