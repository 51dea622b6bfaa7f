use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("coincident source and target points")]
    CoincidentPoints,
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("target at radius {r} is inside the source sphere; interior evaluation not requested")]
    TargetInsideSource { r: f64 },
    #[error("GMRES did not converge: residual {residual:.3e} after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
