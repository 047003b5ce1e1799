//! Lower bounds for the bending energy of isometrically immersed surface
//! charts.
//!
//! The crate is organised around five building blocks:
//!
//! * [`geometry`]: charts, metrics, immersions and curvature quantities,
//! * [`framed`]: framed loops, extendability, parallel transport and Burgers
//!   vectors together with the two loop-level inequalities,
//! * [`sphere`]: winding numbers, Gauss-map degree and the spherical
//!   isoperimetric chain,
//! * [`poisson`]: the floating-potential finite-element solver and the
//!   multiply-connected curvature norms built on it,
//! * [`foliation`]: level-set foliations of the potential and the end-to-end
//!   verification of the curvature lower bound.
//!
//! [`scenarios`] wires these into reproducible experiments (cones, E-cones,
//! curvature dipoles, spherical caps, graphs) and [`report`] provides the
//! configuration, report and file-format layer used by the `wbtool` binary.

// `!(x > y)` is used on purpose so that NaN falls into the rejecting branch
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::type_complexity)]

pub mod cli;
pub mod error;
pub mod foliation;
pub mod framed;
pub mod geometry;
pub mod numerics;
pub mod poisson;
pub mod report;
pub mod scenarios;
pub mod sphere;
pub mod tolerances;

pub use error::{Error, Result};
