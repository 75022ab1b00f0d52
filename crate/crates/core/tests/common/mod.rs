#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use pathquant_core::states::{make_polarized_profile, LinearPolarization, Profile};
use pathquant_core::{Complex64, GridSection, GridSpec, Planck};

/// `∫_{ℝⁿ} exp(−½xᵀAx + Jᵀx) dx = (2π)^{n/2} det(A)^{−1/2} exp(½JᵀA⁻¹J)` for
/// complex symmetric `A` with positive definite real part. The square root
/// is taken on the principal branch; callers use it where `det A > 0`.
pub fn gaussian_integral(a: &DMatrix<Complex64>, j: &DVector<Complex64>) -> Complex64 {
    let n = a.nrows() as f64;
    let det = a.determinant();
    let inv = a.clone().try_inverse().expect("invertible");
    let quad = (j.transpose() * &inv * j)[(0, 0)];
    Complex64::new((2.0 * std::f64::consts::PI).powf(n / 2.0), 0.0) / det.sqrt() * (quad * 0.5).exp()
}

/// `σ(x0, x1)` with `x = (p0, q0, p1, q1)` written as `½xᵀSx`.
pub fn pairing_matrix_4d() -> DMatrix<Complex64> {
    let mut s = DMatrix::from_element(4, 4, Complex64::new(0.0, 0.0));
    s[(0, 3)] = 1.0.into();
    s[(3, 0)] = 1.0.into();
    s[(1, 2)] = (-1.0).into();
    s[(2, 1)] = (-1.0).into();
    s
}

pub fn hbar(x: f64) -> Planck {
    Planck::new(x).unwrap()
}

pub fn kahler() -> LinearPolarization {
    LinearPolarization::complexified(1.0, 0.0).unwrap()
}

pub fn hermite_state(pol: &LinearPolarization, k: usize, tau: f64, spec: GridSpec, h: Planck) -> GridSection {
    make_polarized_profile(pol, &Profile::natural_hermite(k, tau, h), spec, h).unwrap()
}
