use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimplicialError {
    #[error("cochain arity {found} does not match simplices with {expected} vertices")]
    ArityMismatch { expected: usize, found: usize },
    #[error("unsupported dimension {0}")]
    Dimension(usize),
    #[error("simplex {0} is degenerate")]
    Degenerate(usize),
    #[error("inconsistent orientation: {0}")]
    Orientation(String),
    #[error("invalid triangulation: {0}")]
    Invalid(String),
    #[error("{levels} subdivision levels exceed the bound of {max}")]
    ResourceBound { levels: usize, max: usize },
    #[error("pair is not closed: residual {residual:e} at {condition}")]
    NotClosed { condition: &'static str, residual: f64 },
    #[error("cochain invariant violated: {0}")]
    Invariant(String),
    #[error("finite differences did not settle: {0:e} between steps")]
    VanEstNoise(f64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SimplicialError>;
