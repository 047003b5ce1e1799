//! Embedded cone around a hole: solve for the floating potential, walk the
//! proof chain of the curvature lower bound and compare with the closed form.
//!
//! ```text
//! cargo run --release --example cone_bound -- 1.5707963
//! ```

use willmore::foliation::{verify_main_theorem, ChainOptions};
use willmore::geometry::CurveInChart;
use willmore::numerics::V2;
use willmore::scenarios::cone::{build_cone, ConeSpec};

fn main() -> willmore::Result<()> {
    let alpha = std::env::args().nth(1).map(|s| s.parse::<f64>()).transpose().map_err(|e| willmore::Error::Config(e.to_string()))?;
    let spec = ConeSpec { alpha: alpha.unwrap_or(std::f64::consts::FRAC_PI_2), ..Default::default() };
    spec.validate()?;
    println!("cone deficit {:.6}, r0 = {}, R = {}", spec.alpha, spec.r0, spec.big_r);

    let b = build_cone(&spec, 1)?;
    let Some(chart) = b.embedded else {
        println!("no embedded cone for a non-positive deficit");
        return Ok(());
    };
    let hole = CurveInChart::circle(V2::zeros(), 2.0 * spec.r0, 512);
    let report = verify_main_theorem(&chart, &[hole], ChainOptions::default())?;

    println!("enclosed curvature {:.6} (deficit {:.6})", report.hole_charges[0], spec.alpha);
    println!("L1 norm {:.6}, dual norm^2 {:.6} (closed form {:.6})", report.l1, report.dual_norm_sq, spec.dual_norm_sq());
    for s in &report.steps {
        println!("  {:<48} {:>12.6} {:?} {:>12.6}  {}", s.label, s.lhs, s.relation, s.rhs, if s.holds { "ok" } else { "FAIL" });
    }
    println!("bending energy {:.6} >= bound {:.6} (closed form {:.6})", report.lhs, report.rhs, spec.curvature_bound());
    println!("Burgers bound {:.6}", spec.burgers_bound());
    Ok(())
}
