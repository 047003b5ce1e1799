use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::PoissonProblem;
use crate::error::{Error, Result};
use crate::geometry::{ConeMetric, DipoleMetric, FCDomainMesh, InducedMetric, MetricField, Sphere};

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MetricSpec {
    #[default]
    Euclidean,
    /// Cone metric with angular deficit `alpha`.
    Cone { alpha: f64 },
    Dipole { epsilon: f64 },
    /// Round sphere in geodesic polar coordinates.
    Sphere { radius: f64 },
}

impl MetricSpec {
    pub fn build(&self, mesh: &FCDomainMesh) -> Result<MetricField> {
        let v = mesh.vertices();
        match *self {
            MetricSpec::Euclidean => Ok(MetricField::euclidean()),
            MetricSpec::Cone { alpha } => {
                if alpha >= 2.0 * std::f64::consts::PI {
                    return Err(Error::Config(format!("cone deficit {alpha} must be below 2π")));
                }
                MetricField::analytic(ConeMetric::from_deficit(alpha), v)
            }
            MetricSpec::Dipole { epsilon } => MetricField::analytic(DipoleMetric { epsilon }, v),
            MetricSpec::Sphere { radius } => {
                if !(radius > 0.0) {
                    return Err(Error::Config("sphere radius must be positive".into()));
                }
                MetricField::analytic(InducedMetric(Sphere { radius }), v)
            }
        }
    }
}

/// `"analytic:zero"`, `"analytic:intrinsic"` (Gaussian curvature of the
/// metric at barycenters) or explicit per-element values.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SourceSpec {
    Analytic(String),
    Values(Vec<f64>),
}

/// On-disk floating-potential problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    pub mesh: FCDomainMesh,
    #[serde(default)]
    pub metric: MetricSpec,
    pub source: SourceSpec,
    #[serde(default)]
    pub hole_charges: Option<Vec<f64>>,
}

impl ProblemFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }

    pub fn to_problem(&self) -> Result<PoissonProblem> {
        let mesh = Arc::new(self.mesh.clone());
        let metric = self.metric.build(&mesh)?;
        let charges = self.hole_charges.clone().unwrap_or_else(|| vec![0.0; mesh.num_holes()]);
        let source = match &self.source {
            SourceSpec::Values(v) => v.clone(),
            SourceSpec::Analytic(id) => match id.as_str() {
                "analytic:zero" => vec![0.0; mesh.num_elements()],
                "analytic:intrinsic" => (0..mesh.num_elements())
                    .map(|e| metric.gaussian_curvature(mesh.barycenter(e)))
                    .collect(),
                other => return Err(Error::Config(format!("unknown analytic source {other:?}"))),
            },
        };
        PoissonProblem::new(mesh, metric, source, charges)
    }
}
