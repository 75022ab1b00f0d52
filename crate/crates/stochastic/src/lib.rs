//! Wiener-path sampling and Riemann sums of two-point integrands
//! `Σ F(x(t_i), x(t_{i+1}))` under different prescriptions.

pub mod error;
pub mod experiment;
pub mod family;
pub mod path;
pub mod prescription;

pub use error::{Result, StochasticError};
pub use experiment::{
    correction_experiment, quadratic_variation, second_order_welldefined, smooth_path_null, CorrectionRow,
    DifferenceRow, SmoothNullReport, TableRow,
};
pub use family::SmoothFn;
pub use path::{sample_path, sample_paths, smooth_path, WienerPath};
pub use prescription::{prescription_sum, Prescription};
