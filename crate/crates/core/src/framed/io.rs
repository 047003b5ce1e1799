use std::path::Path;

use serde::{Deserialize, Serialize};

use super::frame_loop::FramedLoop;
use crate::error::{Error, Result};
use crate::numerics::V3;

/// On-disk framed loop: optional parameters, positions and normals.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoopFile {
    #[serde(default)]
    pub phi: Option<Vec<f64>>,
    pub gamma: Vec<[f64; 3]>,
    pub normal: Vec<[f64; 3]>,
}

impl LoopFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_loop(&self) -> Result<FramedLoop> {
        let g: Vec<V3> = self.gamma.iter().map(|p| V3::from(*p)).collect();
        let n: Vec<V3> = self.normal.iter().map(|p| V3::from(*p)).collect();
        match &self.phi {
            Some(phi) => FramedLoop::with_parameters(phi, g, n),
            None => FramedLoop::new(g, n),
        }
    }

    pub fn from_loop(lp: &FramedLoop) -> Self {
        let h = lp.step();
        Self {
            phi: Some((0..lp.len()).map(|k| k as f64 * h).collect()),
            gamma: lp.gamma().iter().map(|v| [v.x, v.y, v.z]).collect(),
            normal: lp.normal().iter().map(|v| [v.x, v.y, v.z]).collect(),
        }
    }
}
