//! Charts, metrics, immersions and the curvature quantities built on them.

mod chart;
mod curve;
mod mesh;
pub mod meshgen;
mod metric;
mod surface;

pub use chart::{enclosed_curvature_intrinsic, AgmReport, CurvatureFields, ElementRule, ImmersedChart, PointGeometry};
pub use curve::{winding_number, CurveInChart};
pub use mesh::FCDomainMesh;
pub(crate) use mesh::polygon_area;
pub use metric::{
    ConeMetric, DerivativeMode, DipoleMetric, EuclideanMetric, MetricFormula, MetricJet,
    MetricField, Sym2,
};
pub use surface::{
    surface_jet, ConeSurface, Cylinder, DipoleWrap, ECone, Graph, HeightFunction,
    InducedMetric, Plane, Polynomial, Sphere, Surface, SurfaceJet,
};

use num_dual::DualNum;

/// Scalar type accepted by analytic formulas: `f64` or any dual number over
/// it, so that one formula yields values and exact derivatives.
pub trait Scalar: DualNum<Primitive = f64> + Copy {}
impl<T: DualNum<Primitive = f64> + Copy> Scalar for T {}

pub(crate) fn lift<D: Scalar>(v: f64) -> D {
    D::from(v)
}
