//! Framed loops: a closed space curve with a unit normal field along it.

mod bounds;
mod frame_loop;
mod io;
mod transport;
mod trihedron;

pub use bounds::{check_burgers_bound, check_iso_inequality, BurgersBoundCheck, IsoCase, IsoCheck};
pub use frame_loop::{FramedLoop, Sampling};
pub use io::LoopFile;
pub use transport::{burgers_from_turning, burgers_intrinsic, burgers_vector, BurgersResult};
pub use trihedron::TrihedronPath;
pub(crate) use transport::turning_density;
