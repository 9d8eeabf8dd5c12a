use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("length must be positive and finite, got {0}")]
    NonPositiveLength(f64),
    #[error("unsupported topology: {0}")]
    UnsupportedTopology(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
    #[error("bound input out of range: {0}")]
    OutOfRange(String),
}

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("meshing failed for block {block}: {reason}")]
    Meshing { block: usize, reason: String },
    #[error("seam mismatch: {0}")]
    SeamMismatch(String),
    #[error("separating curve: {0}")]
    SeparatingCurve(String),
    #[error("invalid mesh: {0}")]
    Invalid(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("mesh format error at line {line}: {reason}")]
    Format { line: usize, reason: String },
}

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("zero-area triangle {0}")]
    ZeroArea(usize),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("eigensolver did not converge after {iterations} iterations (worst residual {worst_residual:e})")]
    NotConverged {
        iterations: usize,
        worst_residual: f64,
        residuals: Vec<f64>,
    },
    #[error("zero function has no Rayleigh quotient")]
    ZeroFunction,
    #[error("convergence study: {0}")]
    Convergence(String),
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid construction: {0}")]
    InvalidConstruction(String),
    #[error("band under-resolved: {layers} layers across the band, need at least {required}")]
    UnderResolved { layers: usize, required: usize },
    #[error("mesh mismatch: family was built on mesh {family} but the result belongs to {result}")]
    MeshMismatch { family: String, result: String },
    #[error("insufficient eigenpairs: need {needed}, have {have}")]
    InsufficientEigenpairs { needed: usize, have: usize },
    #[error("campaign config: {0}")]
    Config(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
