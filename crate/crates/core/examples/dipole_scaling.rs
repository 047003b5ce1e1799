//! How the naive and improved foliation bounds for a dislocation dipole grow
//! with the outer radius, and the two-hole H^-1 norm that stays bounded.

use willmore::report::ScenarioOutput;
use willmore::scenarios::dipole::{scaling_checks, DipoleSpec};

fn main() -> willmore::Result<()> {
    let spec = DipoleSpec { ratios: vec![10.0, 20.0, 40.0, 80.0], ..Default::default() };
    let mut out = ScenarioOutput::default();
    scaling_checks(&spec, &mut out)?;
    for s in &out.series {
        print!("{}", s.to_csv());
    }
    for c in &out.checks {
        println!("[{}] {} (lhs {:.6e}, rhs {:.6e})", if c.passes() { "ok" } else { "FAIL" }, c.name, c.lhs, c.rhs);
    }
    Ok(())
}
