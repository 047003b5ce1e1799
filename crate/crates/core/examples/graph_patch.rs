//! Everything that can be checked on a single graph patch z = u(x, y) over the
//! unit disc: curvature fields, Gauss–Bonnet, the degree/winding identity and
//! the small-slope expansion of the isoperimetric inequality.
//!
//! ```text
//! cargo run --release --example graph_patch -- "0.5*x^2 - 0.3*x*y + 0.2*y^3"
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use willmore::geometry::{CurveInChart, Polynomial};
use willmore::numerics::V2;
use willmore::scenarios::graph::{degree_winding_pairs, expansion, graph_chart, olbermann_sides};

fn main() -> willmore::Result<()> {
    let src = std::env::args().nth(1).unwrap_or_else(|| "0.5*x^2 - 0.5*y^2 + 0.3*x*y^2".into());
    let u = Polynomial::parse(&src)?;
    println!("u = {u}");

    let chart = graph_chart(&u, 16)?;
    let agm = chart.pointwise_agm_check()?;
    println!("bending energy {:.6}, AGM report {agm:?}", chart.bending_energy());
    let rim = CurveInChart::circle(V2::zeros(), 1.0, 512);
    println!("Gauss-Bonnet residual on the rim {:.3e}", chart.gauss_bonnet_residual(&rim)?);

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let s = degree_winding_pairs(&chart, 50, &mut rng)?;
    println!("degree/winding: {} pairs, {} failures, {} with distinct degrees", s.tested, s.failures, s.nontrivial);

    let (lhs, rhs) = olbermann_sides(&u);
    println!("linearised inequality {lhs:.6} >= {rhs:.6}");
    println!("{:>8} {:>14} {:>14}", "eps", "area res", "boundary res");
    for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
        let e = expansion(&u, eps)?;
        println!("{eps:>8.0e} {:>14.4e} {:>14.4e}", e.area_residual, e.boundary_residual);
    }
    Ok(())
}
