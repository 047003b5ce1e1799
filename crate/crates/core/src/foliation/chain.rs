use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::level::{leaf_flux_identity, LevelSets};
use crate::error::{Error, Result};
use crate::framed::check_iso_inequality;
use crate::geometry::{CurveInChart, ImmersedChart};
use crate::numerics::trapezoid;
use crate::poisson::{l1mc_norm, solve_floating_potential, PoissonProblem, PotentialSolution};
use crate::tolerances::{scaled, COAREA, INEQ};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `lhs ≥ rhs` up to the inequality tolerance.
    Ge,
    /// `lhs = rhs` up to the coarea tolerance.
    Eq,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainStep {
    pub label: String,
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl ChainStep {
    fn new(label: &str, relation: Relation, lhs: f64, rhs: f64) -> Self {
        let holds = match relation {
            Relation::Ge => lhs >= rhs - scaled(INEQ) * rhs.abs(),
            Relation::Eq => (lhs - rhs).abs() <= scaled(COAREA) * lhs.abs().max(rhs.abs()),
        };
        Self { label: label.to_string(), relation, lhs, rhs, holds }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub bending_energy: f64,
    pub hole_charges: Vec<f64>,
    pub l1: f64,
    pub dual_norm_sq: f64,
    /// Bending energy.
    pub lhs: f64,
    /// `(4π − ‖K‖_{L¹_MC}) / ‖K‖_{L¹_MC} · ‖K‖²_{H⁻¹_MC}`.
    pub rhs: f64,
    pub holds: bool,
    /// `‖K‖_{L¹_MC} ≥ 4π`: the bound says nothing.
    pub vacuous: bool,
    /// False in the non-extendable annulus variant, which is reported only.
    pub asserted: bool,
    pub steps: Vec<ChainStep>,
    pub levels_used: usize,
    pub levels_skipped: usize,
    pub leaves: usize,
    pub max_leaf_flux_residual: f64,
    pub leaf_iso_checked: usize,
    pub leaf_iso_failed: usize,
}

impl ChainReport {
    pub fn all_steps_hold(&self) -> bool {
        self.steps.iter().all(|s| s.holds)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ChainOptions {
    pub levels: usize,
    /// Run the per-leaf isoperimetric check on every `n`-th level.
    pub leaf_iso_every: usize,
    /// Replace `K_1` by `K_1 − 2π` on a non-extendable annulus.
    pub nonextendable_annulus: bool,
}

impl Default for ChainOptions {
    fn default() -> Self {
        Self { levels: 200, leaf_iso_every: 10, nonextendable_annulus: false }
    }
}

/// Per-leaf sums entering the chain.
#[derive(Debug, Clone, Copy, Default)]
struct LeafSums {
    flux: f64,
    dn_sq_over_grad: f64,
    dn: f64,
    enclosed: f64,
}

fn leaf_sums(chart: &ImmersedChart, p: &PoissonProblem, lp: &super::LevelLoop) -> LeafSums {
    let mut s = LeafSums { enclosed: lp.enclosed_total, ..Default::default() };
    for (e, x, grad, dl) in lp.quadrature(p) {
        let dn = match chart.point_geometry(x) {
            Some(g) => g.dn_sq.max(0.0).sqrt(),
            None => chart.fields().dn_sq[e].max(0.0).sqrt(),
        };
        s.flux += grad * dl;
        s.dn += dn * dl;
        if grad > 0.0 {
            s.dn_sq_over_grad += dn * dn / grad * dl;
        }
    }
    s
}

/// End-to-end check of the curvature lower bound on an immersed chart.
///
/// `hole_curves[i]` is a counter-clockwise chart curve around hole `i + 1`
/// alone; it defines the enclosed curvature and is used for the
/// extendability test.
pub fn verify_main_theorem(chart: &ImmersedChart, hole_curves: &[CurveInChart], opts: ChainOptions) -> Result<ChainReport> {
    let mesh = chart.mesh();
    if hole_curves.len() != mesh.num_holes() {
        return Err(Error::Config(format!("{} hole curves for {} holes", hole_curves.len(), mesh.num_holes())));
    }
    if opts.nonextendable_annulus && mesh.num_holes() != 1 {
        return Err(Error::Config("the non-extendable variant is only defined for annuli".into()));
    }
    let mut charges = Vec::with_capacity(hole_curves.len());
    for (i, c) in hole_curves.iter().enumerate() {
        if !opts.nonextendable_annulus && !chart.framed_loop(c)?.is_extendable()? {
            return Err(Error::NotExtendable(i + 1));
        }
        charges.push(chart.enclosed_curvature(i + 1, c)?);
    }
    if opts.nonextendable_annulus {
        charges[0] -= 2.0 * PI;
    }
    let problem = PoissonProblem::from_chart(chart, charges.clone())?;
    let sol = solve_floating_potential(&problem)?;
    Ok(chain_from_solution(chart, &sol, charges, opts))
}

pub(crate) fn chain_from_solution(chart: &ImmersedChart, sol: &PotentialSolution, charges: Vec<f64>, opts: ChainOptions) -> ChainReport {
    let p = &sol.problem;
    let energy = chart.bending_energy();
    let l1 = l1mc_norm(p);
    let dual_sq = sol.energy;
    let rhs = if l1 > 0.0 { (4.0 * PI - l1) / l1 * dual_sq } else { 0.0 };
    let vacuous = l1 >= 4.0 * PI * (1.0 - 1e-9);
    let holds = vacuous || energy >= rhs - scaled(INEQ) * rhs.abs();
    let mut report = ChainReport {
        bending_energy: energy,
        hole_charges: charges,
        l1,
        dual_norm_sq: dual_sq,
        lhs: energy,
        rhs,
        holds,
        vacuous,
        asserted: !opts.nonextendable_annulus,
        steps: Vec::new(),
        levels_used: 0,
        levels_skipped: 0,
        leaves: 0,
        max_leaf_flux_residual: 0.0,
        leaf_iso_checked: 0,
        leaf_iso_failed: 0,
    };
    if l1 == 0.0 || dual_sq == 0.0 {
        return report;
    }

    let ls = LevelSets::new(sol);
    let levels = ls.quantile_levels(opts.levels);
    let per_level: Vec<Option<(Vec<LeafSums>, f64, usize, usize)>> = levels
        .par_iter()
        .enumerate()
        .map(|(k, &lambda)| {
            let loops = ls.extract(lambda).ok()?;
            let sums: Vec<LeafSums> = loops.iter().map(|lp| leaf_sums(chart, p, lp)).collect();
            let worst = loops.iter().map(|lp| leaf_flux_identity(sol, lp).residual).fold(0.0, f64::max);
            let (mut checked, mut failed) = (0, 0);
            if opts.leaf_iso_every > 0 && k % opts.leaf_iso_every == 0 {
                for lp in &loops {
                    if let Ok(c) = chart.framed_loop(&lp.curve).and_then(|f| check_iso_inequality(&f)) {
                        checked += 1;
                        if !c.holds {
                            failed += 1;
                        }
                    }
                }
            }
            Some((sums, worst, checked, failed))
        })
        .collect();

    let mut lam = Vec::new();
    let mut cols: Vec<[f64; 6]> = Vec::new();
    let prefactor = 4.0 * PI - l1;
    for (lambda, entry) in levels.iter().zip(&per_level) {
        let Some((sums, worst, checked, failed)) = entry else {
            report.levels_skipped += 1;
            continue;
        };
        report.levels_used += 1;
        report.leaves += sums.len();
        report.max_leaf_flux_residual = report.max_leaf_flux_residual.max(*worst);
        report.leaf_iso_checked += checked;
        report.leaf_iso_failed += failed;
        let mut c = [0.0; 6];
        for s in sums {
            let i = s.enclosed.abs();
            c[0] += l1 * s.dn_sq_over_grad;
            c[1] += s.flux * s.dn_sq_over_grad;
            c[2] += s.dn * s.dn;
            c[3] += (4.0 * PI - i) * i;
            c[4] += prefactor * s.flux;
        }
        lam.push(*lambda);
        cols.push(c);
    }
    if lam.len() < 2 {
        return report;
    }
    // the leaves nearest the ends stand in for the thin end intervals
    let (lo, hi) = ls.range();
    lam.insert(0, lo);
    cols.insert(0, cols[0]);
    lam.push(hi);
    cols.push(*cols.last().unwrap());
    let integral = |i: usize| trapezoid(&lam, &cols.iter().map(|c| c[i]).collect::<Vec<_>>());
    let s: Vec<f64> = (0..5).map(integral).collect();
    report.steps = vec![
        ChainStep::new("coarea: bending energy as a leaf integral", Relation::Eq, l1 * energy, s[0]),
        ChainStep::new("leaf flux bounded by the L1 norm", Relation::Ge, s[0], s[1]),
        ChainStep::new("Cauchy-Schwarz on each leaf", Relation::Ge, s[1], s[2]),
        ChainStep::new("isoperimetric inequality on each leaf", Relation::Ge, s[2], s[3]),
        ChainStep::new("enclosed curvature bounded by the L1 norm", Relation::Ge, s[3], s[4]),
        ChainStep::new("coarea: Dirichlet energy as a leaf integral", Relation::Eq, s[4], prefactor * dual_sq),
        ChainStep::new("per-leaf isoperimetric checks", Relation::Ge, 0.0, report.leaf_iso_failed as f64),
    ];
    report
}
