//! E-cones: surfaces with k extra turns around the hole. Odd k gives a framed
//! loop that cannot bound a disc, even k one that can.

use willmore::framed::check_iso_inequality;
use willmore::geometry::CurveInChart;
use willmore::numerics::V2;
use willmore::scenarios::econe::econe_chart;

fn main() -> willmore::Result<()> {
    for k in 1..=4 {
        let chart = econe_chart(k, 0.05, 1.0, 8)?;
        let lp = chart.framed_loop(&CurveInChart::circle(V2::zeros(), 0.3, 512))?;
        let iso = check_iso_inequality(&lp)?;
        println!(
            "k = {k}: extendable {}, total geodesic curvature {:.4}, normal turning {:.4}, {:?} form {:.4} >= {:.4}",
            lp.is_extendable()?,
            iso.total_geodesic_curvature,
            iso.normal_turning,
            iso.case,
            iso.lhs,
            iso.rhs
        );
    }
    Ok(())
}
