//! Path-integral quantization of the phase plane.
//!
//! States are sampled sections of the prequantum line bundle over a square
//! grid in (p, q). The crate provides the path-integral inner product, the
//! quantization map in full and polarized form, the Weyl and Kostant-Souriau
//! oracles it is compared against, and the triangle-area star product.

pub mod error;
pub mod geometry;
pub mod io;
pub mod observable;
pub mod poly;
pub mod quantizer;
pub mod star;
pub mod states;
pub mod weyl;

pub use error::{Error, Result};
pub use geometry::{symplectic_pairing, transport_phase, triangle_area, PhasePoint, Planck};
pub use num_complex::Complex64;
pub use observable::Observable;
pub use states::{GridSection, GridSpec, LinearPolarization, Profile};
