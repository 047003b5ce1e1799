//! Closed-form oracles for the public building blocks.

mod common;

use std::f64::consts::{PI, TAU};

use willmore::framed::{burgers_vector, check_burgers_bound, FramedLoop, LoopFile};
use willmore::numerics::V3;
use willmore::poisson::{solve_floating_potential, ProblemFile};
use willmore::scenarios::cap::cap_loop;
use willmore::scenarios::cone::ConeSpec;
use willmore::sphere::{weiner_check, winding_number, SphereCurve};

#[test]
fn planar_loops_have_zero_burgers_vector() {
    let n = 256;
    let gamma: Vec<V3> = (0..n)
        .map(|k| {
            let t = TAU * k as f64 / n as f64;
            V3::new(2.0 * t.cos() + 0.3 * (3.0 * t).cos(), t.sin(), 0.0)
        })
        .collect();
    let lp = FramedLoop::new(gamma, vec![V3::z(); n]).unwrap();
    for base in [0, 17, 128] {
        assert!(burgers_vector(&lp, base).unwrap().magnitude < 1e-10);
    }
    assert!(lp.is_extendable().unwrap());
    assert!((lp.total_geodesic_curvature() - TAU).abs() < 1e-9);
}

#[test]
fn cap_loop_burgers_bound_holds() {
    for theta in [PI / 6.0, PI / 3.0, PI / 2.0] {
        let lp = cap_loop(512, theta, 1.0).unwrap();
        let b = check_burgers_bound(&lp).unwrap();
        assert!(b.holds, "theta {theta}: {} < {}", b.lhs, b.rhs);
        assert!((lp.length() - TAU * theta.sin()).abs() < 1e-9);
    }
}

#[test]
fn fixture_loops_load() {
    for (name, lp) in common::fixture_loops() {
        assert!(lp.len() >= 256, "{name}");
        let back = LoopFile::from_loop(&lp).to_loop().unwrap();
        assert!((back.length() - lp.length()).abs() < 1e-12 * lp.length(), "{name}");
    }
    let bad = LoopFile::load(common::fixture("malformed_loop.json"));
    assert!(bad.is_err());
}

#[test]
fn equator_winding_and_weiner() {
    let e = SphereCurve::equator(128, 2);
    let north = V3::new(0.1, 0.0, 1.0).normalize();
    let south = V3::new(0.03, 0.11, -1.0).normalize();
    assert_eq!(winding_number(&e, &north, &south).unwrap().abs(), 2);
    let w = weiner_check(&SphereCurve::equator(256, 1), 50_000, 3).unwrap();
    assert!(w.holds);
    assert!((w.lhs - 4.0 * PI * PI).abs() < 1e-2, "{}", w.lhs);
}

#[test]
fn fixture_problems_meet_their_charges() {
    for (name, p) in common::fixture_problems() {
        let s = solve_floating_potential(&p).unwrap();
        for (f, q) in s.flux.iter().zip(p.hole_charges()) {
            assert!((f - q).abs() < 1e-6, "{name}: {f} vs {q}");
        }
        assert!(s.cg.relative_residual <= 1e-10, "{name}");
    }
    let zero = ProblemFile::load(&common::fixture("zero_problem.json")).unwrap().to_problem().unwrap();
    let s = solve_floating_potential(&zero).unwrap();
    assert_eq!(s.dual_norm(), 0.0);
}

#[test]
fn cone_fixture_dual_norm_near_closed_form() {
    let p = ProblemFile::load(&common::fixture("cone_problem.json")).unwrap().to_problem().unwrap();
    let s = solve_floating_potential(&p).unwrap();
    let spec = ConeSpec { alpha: PI / 2.0, ..Default::default() };
    let exact = spec.dual_norm_sq();
    assert!((s.energy - exact).abs() / exact < 5e-3, "{} vs {exact}", s.energy);
}
