use serde::Serialize;

use crate::error::{Error, Result};
use crate::framed::burgers_vector;
use crate::geometry::{CurveInChart, ImmersedChart};
use crate::numerics::{trapezoid, V2};
use crate::tolerances::{scaled, INEQ};

/// A leaf of a foliation by closed curves, labelled by a transversal
/// parameter `ψ` with `|dψ|_g = 1` (for instance the radius of a metric
/// `dr² + h(r, φ)² dφ²`).
#[derive(Debug, Clone)]
pub struct FoliationLoop {
    pub param: f64,
    pub curve: CurveInChart,
}

#[derive(Debug, Clone, Serialize)]
pub struct BurgersLeaf {
    pub param: f64,
    pub length: f64,
    pub burgers: f64,
    /// `∫ |D_s N| dℓ`.
    pub turning: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BurgersFoliationBound {
    pub leaves: Vec<BurgersLeaf>,
    /// `∫ (|B|/L)² / L dψ`.
    pub bound: f64,
    /// `∫ (∫|D_s N|)² / L dψ`, which sits between the energy and `bound`.
    pub turning_bound: f64,
    pub energy: f64,
    pub holds: bool,
}

fn segments_cross(a: V2, b: V2, c: V2, d: V2) -> bool {
    let o = |p: V2, q: V2, r: V2| (q - p).perp(&(r - p));
    let (d1, d2, d3, d4) = (o(a, b, c), o(a, b, d), o(c, d, a), o(c, d, b));
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

fn polylines_cross(p: &[V2], q: &[V2]) -> bool {
    (0..p.len()).any(|i| {
        let (a, b) = (p[i], p[(i + 1) % p.len()]);
        (0..q.len()).any(|j| segments_cross(a, b, q[j], q[(j + 1) % q.len()]))
    })
}

/// Lower bound on the bending energy from Burgers vectors of the leaves,
/// through Cauchy–Schwarz on each leaf and the loop-level Burgers bound.
pub fn burgers_foliation_bound(chart: &ImmersedChart, loops: &[FoliationLoop]) -> Result<BurgersFoliationBound> {
    if loops.len() < 2 {
        return Err(Error::Config("a foliation needs at least two leaves".into()));
    }
    for i in 0..loops.len() - 1 {
        if !(loops[i + 1].param > loops[i].param)
            || polylines_cross(loops[i].curve.points(), loops[i + 1].curve.points())
        {
            return Err(Error::LoopsNotDisjoint(i, i + 1));
        }
    }
    let leaves: Result<Vec<BurgersLeaf>> = loops
        .iter()
        .map(|l| {
            let lp = chart.framed_loop(&l.curve)?;
            let b = burgers_vector(&lp, 0)?;
            Ok(BurgersLeaf { param: l.param, length: lp.length(), burgers: b.magnitude, turning: lp.normal_turning() })
        })
        .collect();
    let leaves = leaves?;
    let params: Vec<f64> = leaves.iter().map(|l| l.param).collect();
    let b: Vec<f64> = leaves.iter().map(|l| (l.burgers / l.length).powi(2) / l.length).collect();
    let t: Vec<f64> = leaves.iter().map(|l| l.turning.powi(2) / l.length).collect();
    let bound = trapezoid(&params, &b);
    let turning_bound = trapezoid(&params, &t);
    let energy = chart.bending_energy();
    Ok(BurgersFoliationBound {
        leaves,
        bound,
        turning_bound,
        energy,
        holds: energy >= bound * (1.0 - scaled(INEQ)),
    })
}
