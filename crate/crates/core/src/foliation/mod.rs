//! Level-set foliations of the floating potential: leaf extraction, the
//! flux and coarea identities, the full inequality chain for the curvature
//! lower bound, and Burgers-vector bounds over foliations by loops.

mod burgers;
mod chain;
mod level;

pub use burgers::{burgers_foliation_bound, BurgersFoliationBound, BurgersLeaf, FoliationLoop};
pub use chain::{verify_main_theorem, ChainOptions, ChainReport, ChainStep, Relation};
pub use level::{
    coarea_check, coarea_residual, extract_level_loops, leaf_flux_identity, CoareaCheck, LeafFlux, LevelLoop, LevelSets,
};
