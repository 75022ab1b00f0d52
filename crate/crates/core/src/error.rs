use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("hbar must be strictly positive, got {0}")]
    InvalidHbar(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid polarization: {0}")]
    InvalidPolarization(String),
    #[error("section does not decay at the grid boundary (relative magnitude {ratio:e} > {limit:e})")]
    BoundaryDecay { ratio: f64, limit: f64 },
    #[error("sections live on different grids or hbar values")]
    SpecMismatch,
    #[error("grid too coarse: phase wavelength {wavelength:.4} below two grid spacings {two_h:.4}")]
    SpecTooCoarse { wavelength: f64, two_h: f64 },
    #[error("polynomial degree {0} exceeds the supported bound 4")]
    DegreeBound(usize),
    #[error("observable must be a pure polynomial")]
    NotPolynomial,
    #[error("observable is not affine in p")]
    NotPAffine,
    #[error("negative-norm search failed: {0}")]
    WitnessSearch(String),
    #[error("star product did not converge: {0}")]
    StarConvergence(String),
    #[error("kernel too large for N = {0}")]
    KernelTooLarge(usize),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("format: {0}")]
    Format(String),
}

pub type Result<T> = core::result::Result<T, Error>;
