//! Curves and maps into the unit sphere.

mod degree;
mod disc;
mod weiner;
mod winding;

pub use degree::{DegreeField, GaussImage};
pub use disc::{
    check_degree_winding_relation, check_disc_chain, pushforward_identity_check, AreaRule, DiscChain,
    PushforwardCheck, SphereTest,
};
pub use weiner::{weiner_check, WeinerReport};
pub use winding::{winding_number, SphereCurve};
