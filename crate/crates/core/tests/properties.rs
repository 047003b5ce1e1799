//! Invariants that must hold for every input, checked on random instances.

mod common;

use std::f64::consts::TAU;
use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use willmore::foliation::coarea_check;
use willmore::framed::{burgers_vector, check_iso_inequality, FramedLoop, LoopFile};
use willmore::geometry::meshgen::graded_annulus;
use willmore::geometry::{MetricField, Polynomial};
use willmore::numerics::{V2, V3};
use willmore::poisson::{dual_sup_property_check, solve_floating_potential, PoissonProblem};
use willmore::scenarios::graph::{degree_winding_pairs, graph_chart, random_cubic};
use willmore::sphere::{winding_number, SphereCurve};

/// Smooth loop on the unit sphere framed by the outward normal.
fn sphere_loop(a: f64, b: f64, c: f64, d: f64, n: usize) -> FramedLoop {
    let gamma: Vec<V3> = (0..n)
        .map(|k| {
            let t = TAU * k as f64 / n as f64;
            V3::new(t.cos() + a * (2.0 * t).cos(), t.sin() + b * (3.0 * t).sin(), c + d * (2.0 * t).sin()).normalize()
        })
        .collect();
    FramedLoop::new(gamma.clone(), gamma).unwrap()
}

fn transport_defect(lp: &FramedLoop, from: usize) -> f64 {
    let t = lp.tangent()[from];
    let c = lp.normal()[from].cross(&t);
    let a = lp.parallel_transport(from, 0, t).unwrap();
    let b = lp.parallel_transport(from, 0, c).unwrap();
    let nz = lp.normal()[0];
    [(a.norm() - 1.0).abs(), (b.norm() - 1.0).abs(), a.dot(&b).abs(), a.dot(&nz).abs(), b.dot(&nz).abs()]
        .into_iter()
        .fold(0.0, f64::max)
}

fn unit(z: f64, t: f64) -> V3 {
    let s = (1.0 - z * z).sqrt();
    V3::new(s * t.cos(), s * t.sin(), z)
}

fn annulus_problem(source: &[f64], charge: f64) -> PoissonProblem {
    let mesh = Arc::new(graded_annulus(0.1, 1.0, 4).unwrap());
    let k: Vec<f64> = (0..mesh.num_elements()).map(|e| source[e % source.len()]).collect();
    PoissonProblem::new(mesh, MetricField::euclidean(), k, vec![charge]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn polynomial_display_parses_back(coeffs in prop::collection::vec(-5.0f64..5.0, 1..10)) {
        let monomials = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3)];
        let p = Polynomial { terms: coeffs.iter().zip(monomials).map(|(&c, (i, j))| (i, j, c)).collect() };
        let q = Polynomial::parse(&p.to_string()).unwrap();
        prop_assert_eq!(p, q);
    }

    #[test]
    fn burgers_magnitude_bounded_by_length(a in -0.15f64..0.15, b in -0.15f64..0.15, c in -0.8f64..0.8, d in -0.3f64..0.3, base in 0usize..256) {
        let lp = sphere_loop(a, b, c, d, 256);
        let bv = burgers_vector(&lp, base).unwrap();
        prop_assert!(bv.magnitude <= lp.length() * (1.0 + 1e-9), "{} > {}", bv.magnitude, lp.length());
    }

    #[test]
    fn transport_is_an_isometry_onto_the_tangent_plane(a in -0.15f64..0.15, b in -0.15f64..0.15, c in -0.8f64..0.8, d in -0.3f64..0.3, from in 1usize..512) {
        let lp = sphere_loop(a, b, c, d, 512);
        let defect = transport_defect(&lp, from);
        prop_assert!(defect < 1e-8, "defect {defect:e}");
    }

    #[test]
    fn iso_inequality_holds_and_ignores_the_base_point(a in -0.15f64..0.15, b in -0.15f64..0.15, c in -0.8f64..0.8, d in -0.3f64..0.3, k in 1usize..256) {
        let lp = sphere_loop(a, b, c, d, 256);
        let iso = check_iso_inequality(&lp).unwrap();
        prop_assert!(iso.holds, "{} < {}", iso.lhs, iso.rhs);
        let moved = check_iso_inequality(&lp.rebased(k)).unwrap();
        prop_assert!((moved.lhs - iso.lhs).abs() <= 1e-9 * iso.lhs.abs().max(1.0));
        prop_assert!((moved.rhs - iso.rhs).abs() <= 1e-9 * iso.rhs.abs().max(1.0));
        prop_assert_eq!(moved.case, iso.case);
    }

    #[test]
    fn loop_file_roundtrip(a in -0.15f64..0.15, b in -0.15f64..0.15, c in -0.8f64..0.8, d in -0.3f64..0.3) {
        let lp = sphere_loop(a, b, c, d, 128);
        let json = serde_json::to_string(&LoopFile::from_loop(&lp)).unwrap();
        let back = serde_json::from_str::<LoopFile>(&json).unwrap().to_loop().unwrap();
        let gap = |a: &[V3], b: &[V3]| a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert_eq!(back.len(), lp.len());
        prop_assert!(gap(back.gamma(), lp.gamma()) < 1e-14);
        prop_assert!(gap(back.normal(), lp.normal()) < 1e-14);
    }

    #[test]
    fn winding_numbers_are_antisymmetric_and_cancel_around_triangles(
        a in -0.15f64..0.15, b in -0.15f64..0.15, c in -0.8f64..0.8, d in -0.3f64..0.3,
        pts in prop::array::uniform3((-0.99f64..0.99, 0.0f64..TAU)),
    ) {
        let lp = sphere_loop(a, b, c, d, 256);
        let curve = SphereCurve::from_directions(lp.gamma().iter().copied()).unwrap();
        let [p, q, r] = pts.map(|(z, t)| unit(z, t));
        let w = |x: &V3, y: &V3| winding_number(&curve, x, y);
        let (Ok(pq), Ok(qp), Ok(qr), Ok(rp)) = (w(&p, &q), w(&q, &p), w(&q, &r), w(&r, &p)) else {
            return Err(TestCaseError::reject("degenerate configuration"));
        };
        prop_assert_eq!(pq, -qp);
        prop_assert_eq!(pq + qr + rp, 0);
    }

    #[test]
    fn dual_norm_is_homogeneous(source in prop::collection::vec(-2.0f64..2.0, 1..6), charge in -3.0f64..3.0, s in -4.0f64..4.0) {
        prop_assume!(s.abs() > 1e-3);
        let p = annulus_problem(&source, charge);
        let a = solve_floating_potential(&p).unwrap();
        let b = solve_floating_potential(&p.scaled(s)).unwrap();
        prop_assert!((b.dual_norm() - s.abs() * a.dual_norm()).abs() <= 1e-7 * (1.0 + b.dual_norm()));
        prop_assert!((b.flux[0] - s * charge).abs() <= 1e-7 * (1.0 + charge.abs() * s.abs()));
    }

    #[test]
    fn pairing_is_bounded_by_the_dual_norm(source in prop::collection::vec(-2.0f64..2.0, 1..6), charge in -3.0f64..3.0, c in prop::array::uniform4(-1.0f64..1.0)) {
        let p = annulus_problem(&source, charge);
        let sol = solve_floating_potential(&p).unwrap();
        prop_assume!(sol.dual_norm() > 1e-9);
        // zero on the rim, constant on the hole
        let phi: Vec<f64> = p.mesh().vertices().iter().map(|x: &V2| {
            let r = x.norm();
            (1.0 - r).max(0.0) * (c[0] + (r - 0.1).max(0.0) * (c[1] * x.x + c[2] * x.y + c[3] * x.x * x.y))
        }).collect();
        prop_assume!(phi.iter().any(|v| v.abs() > 1e-6));
        let mut trials = vec![phi];
        trials.push(sol.u.clone());
        let rep = dual_sup_property_check(&sol, &trials).unwrap();
        prop_assert!(rep.all_hold(), "{:?}", rep.trials);
        prop_assert!((rep.trials[1].ratio - 1.0).abs() < 1e-6, "maximiser ratio {}", rep.trials[1].ratio);
    }

    #[test]
    fn coarea_identity_on_random_problems(source in prop::collection::vec(-2.0f64..2.0, 1..6), charge in -3.0f64..3.0) {
        let sol = solve_floating_potential(&annulus_problem(&source, charge)).unwrap();
        prop_assume!(sol.max_abs() > 1e-9);
        let c = coarea_check(&sol);
        prop_assert!(c.holds, "{c:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_graphs_satisfy_the_pointwise_identities_and_degree_winding(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_cubic(&mut rng);
        let chart = graph_chart(&u, 8).unwrap();
        prop_assert!(chart.pointwise_agm_check().is_ok());
        prop_assert!(chart.fields().identity_residual <= chart.curvature_tolerance());
        let s = degree_winding_pairs(&chart, 10, &mut rng).unwrap();
        prop_assert_eq!(s.failures, 0);
    }
}
