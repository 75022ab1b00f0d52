//! Diagonal cochains on triangulated intervals and planar regions, their
//! generalized Riemann sums, the van Est map and closed pairs.

pub mod cochain;
pub mod error;
pub mod sum;
pub mod triangulation;

pub use cochain::{hull_cochain_1form, hull_cochain_2form, pullback_cochain, van_est, DiagonalCochain};
pub use error::{Result, SimplicialError};
pub use num_complex::Complex64;
pub use sum::{
    boundary_sum, converge, integrate_van_est, integrate_van_est_boundary, riemann_sum, stokes_pair, ClosedPair,
    LevelValue, MAX_LEVELS,
};
pub use triangulation::{barycentric_subdivide, Simplex, Triangulation};

/// Point of the embedding plane; one-dimensional manifolds use coordinate 0.
pub type Coord = [f64; 2];
