//! Regenerates the JSON fixtures under `tests/fixtures`:
//!
//! ```text
//! cargo run --release --example make_fixtures -- crates/core/tests/fixtures
//! ```

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};
use std::path::PathBuf;

use willmore::framed::LoopFile;
use willmore::geometry::meshgen::{graded_annulus, two_hole_disc};
use willmore::geometry::CurveInChart;
use willmore::numerics::V2;
use willmore::poisson::{MetricSpec, ProblemFile, SourceSpec};
use willmore::scenarios::{cap, cone, econe};

fn main() -> willmore::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "tests/fixtures".into()));
    std::fs::create_dir_all(&dir)?;
    let save_loop = |name: &str, lp: &willmore::framed::FramedLoop| -> willmore::Result<()> {
        std::fs::write(dir.join(name), serde_json::to_string(&LoopFile::from_loop(lp))?)?;
        Ok(())
    };

    save_loop("cap_loop.json", &cap::cap_loop(512, FRAC_PI_3, 1.0)?)?;
    save_loop("trivial_frame.json", &econe::trivial_frame(256)?)?;

    let spec = cone::ConeSpec::default();
    let b = cone::build_cone(&spec, 0)?;
    let chart = b.embedded.expect("positive deficit");
    save_loop("cone_loop.json", &chart.framed_loop(&CurveInChart::circle(V2::zeros(), 0.5, 512))?)?;

    let e = econe::econe_chart(1, 0.05, 1.0, 8)?;
    save_loop("econe_k1_loop.json", &e.framed_loop(&CurveInChart::circle(V2::zeros(), 0.3, 512))?)?;

    std::fs::write(dir.join("malformed_loop.json"), "{\"gamma\": [[1.0, 0.0, 0.0], [0.0, 1.0,")?;

    let alpha = FRAC_PI_2;
    let problems = [
        (
            "cone_problem.json",
            ProblemFile {
                mesh: graded_annulus(0.05, 1.0, 32)?,
                metric: MetricSpec::Cone { alpha },
                source: SourceSpec::Analytic("analytic:zero".into()),
                hole_charges: Some(vec![alpha]),
            },
        ),
        (
            "zero_problem.json",
            ProblemFile {
                mesh: graded_annulus(0.1, 1.0, 8)?,
                metric: MetricSpec::Euclidean,
                source: SourceSpec::Analytic("analytic:zero".into()),
                hole_charges: None,
            },
        ),
        (
            "two_hole_problem.json",
            ProblemFile {
                mesh: two_hole_disc(1.0, 0.05, 0.02, 48)?,
                metric: MetricSpec::Euclidean,
                source: SourceSpec::Analytic("analytic:zero".into()),
                hole_charges: Some(vec![PI / 8.0, -PI / 8.0]),
            },
        ),
    ];
    for (name, p) in problems {
        p.save(&dir.join(name))?;
    }
    println!("fixtures written to {}", dir.display());
    Ok(())
}
