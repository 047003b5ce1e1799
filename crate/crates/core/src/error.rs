use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure mode surfaced by the toolkit.
///
/// Variants carry enough context (element, sample or hole index) to locate
/// the offending piece of input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate element {element}: det(dfᵀdf) = {det:e}")]
    DegenerateElement { element: usize, det: f64 },
    #[error("metric derivatives unavailable: {0}")]
    DerivativeUnavailable(&'static str),
    #[error("curvature bound violated on element {element}: margin {margin:e}")]
    ViolationFound { element: usize, margin: f64 },
    #[error("curve touches the mesh boundary non-smoothly at sample {0}")]
    BoundaryTooRough(usize),
    #[error("test curve for hole {0} is not homotopic to that hole alone")]
    HomotopyClassAmbiguous(usize),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("metric is not positive definite at ({x}, {y})")]
    NonSpdMetric { x: f64, y: f64 },

    #[error("invalid framed loop: {0}")]
    InvalidLoop(String),
    #[error("sampling too coarse: rotation of {angle:.3} rad between samples {index} and {next}")]
    SamplingTooCoarse { index: usize, next: usize, angle: f64 },
    #[error("vector is not tangent: <v, N> = {0:e}")]
    NotTangent(f64),

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("point is not a regular value of the Gauss map")]
    NotRegularValue,

    #[error("singular system: {0}")]
    SingularSystem(String),
    #[error("trial function {0} is not admissible")]
    InadmissibleTrial(usize),

    #[error("level {level} is near a critical value (|du| = {grad:e})")]
    NearCriticalLevel { level: f64, grad: f64 },
    #[error("level {level} is outside the range [{min}, {max}]")]
    LevelOutOfRange { level: f64, min: f64, max: f64 },
    #[error("immersion is not extendable along boundary loop {0}")]
    NotExtendable(usize),
    #[error("foliation loops {0} and {1} intersect")]
    LoopsNotDisjoint(usize, usize),
    #[error("height function is not twice differentiable: {0}")]
    NotC2(String),

    #[error("configuration error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
