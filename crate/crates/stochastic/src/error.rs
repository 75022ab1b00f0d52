use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StochasticError {
    #[error("need at least 2 steps, got {0}")]
    TooFewSteps(usize),
    #[error("need at least 2 paths, got {0}")]
    TooFewPaths(usize),
    #[error("step counts must all divide {max}, {n} does not")]
    IncompatibleSteps { n: usize, max: usize },
    #[error("empty step list")]
    EmptySteps,
    #[error("polynomial degree {0} exceeds 4")]
    Degree(usize),
    #[error("non-finite parameter: {0}")]
    NonFinite(&'static str),
}

pub type Result<T> = std::result::Result<T, StochasticError>;
