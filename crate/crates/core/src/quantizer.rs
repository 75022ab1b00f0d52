//! The quantization map `f ↦ Q_f` and the Kostant-Souriau operator.
//!
//! With the middle vertex placed at twice the integration variable and the
//! triangle taken in the order (u, z, 2v), the full form
//!
//! `Q_fΨ(u) = (1/(2πħ)²) ∫∫ f(v) Ψ(z) exp(iΩ(u, z, 2v)/ħ) dv dz`
//!
//! reduces, after the z integral, to
//!
//! `Q_fΨ(u) = (1/4πħ) ∫ f((u+w)/2) (GΨ)(w) τ(w, u) dw`
//!
//! where `G` is the symplectic transform and `τ` the transport phase. On
//! polarized states `GΨ = Ψ`, which gives the simplified form.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{PhasePoint, Planck};
use crate::observable::Observable;
use crate::states::{symplectic_transform, GridSection, GridSpec};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Largest N for which a dense kernel is materialized.
pub const KERNEL_MAX_N: usize = 48;

fn phase_table(spec: &GridSpec, hbar: f64) -> Vec<Complex64> {
    let x = spec.coords();
    let n = spec.n;
    (0..n * n).map(|k| Complex64::from_polar(1.0, x[k / n] * x[k % n] / (2.0 * hbar))).collect()
}

/// f on the half-step lattice: entry `(a, b)` is `f((x_a' , x_b'))` with
/// `x_k' = −L + k·h/2`, so `f((u_i + w_i')/2)` is entry `i + i'`.
fn half_lattice(f: &Observable, spec: &GridSpec) -> Vec<Complex64> {
    let m = 2 * spec.n - 1;
    let h2 = 0.5 * spec.spacing();
    let l = spec.half_width;
    (0..m * m)
        .into_par_iter()
        .map(|k| f.eval(PhasePoint::new(-l + (k / m) as f64 * h2, -l + (k % m) as f64 * h2)))
        .collect()
}

/// `(1/4πħ) Σ_w W_w f((u+w)/2) χ(w) τ(w,u)` at every grid point `u`.
fn midpoint_step(f: &Observable, chi: &GridSection) -> GridSection {
    let spec = chi.spec();
    let n = spec.n;
    let m = 2 * n - 1;
    let hb = chi.hbar().get();
    let e = phase_table(&spec, hb);
    let fh = half_lattice(f, &spec);
    let w = spec.weights();
    let c = chi.values();
    let norm = 1.0 / (4.0 * std::f64::consts::PI * hb);
    let values: Vec<Complex64> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n, k % n);
            // τ(w,u) = exp(i(w_p u_q − w_q u_p)/2ħ)
            let b: Vec<Complex64> = (0..n).map(|jj| e[jj * n + i].conj() * w[jj]).collect();
            let mut acc = ZERO;
            for ii in 0..n {
                let a = e[ii * n + j] * w[ii];
                let frow = &fh[(i + ii) * m + j..];
                let crow = &c[ii * n..(ii + 1) * n];
                let mut inner = ZERO;
                for jj in 0..n {
                    inner += frow[jj] * crow[jj] * b[jj];
                }
                acc += a * inner;
            }
            acc * norm
        })
        .collect();
    GridSection::new(spec, chi.hbar(), values).expect("finite output")
}

fn check_inputs(f: &Observable, psi: &GridSection) -> Result<()> {
    if f.degree() > crate::observable::MAX_DEGREE {
        return Err(Error::DegreeBound(f.degree()));
    }
    psi.spec().check_resolution(psi.hbar())?;
    psi.check_decay()
}

/// Full four-dimensional form, valid on any decaying section.
pub fn quantize_full(f: &Observable, psi: &GridSection) -> Result<GridSection> {
    check_inputs(f, psi)?;
    Ok(midpoint_step(f, &symplectic_transform(psi)))
}

/// Simplified form for polarized inputs.
pub fn quantize_polarized(f: &Observable, psi: &GridSection) -> Result<GridSection> {
    check_inputs(f, psi)?;
    Ok(midpoint_step(f, psi))
}

/// Dense section over M×M; row index is the output point `u1`, column the
/// input point `u0`, both flattened row-major (p index major).
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorKernel {
    pub spec: GridSpec,
    pub hbar: Planck,
    pub values: DMatrix<Complex64>,
}

/// `K(u1, u0) = (1/4πħ)·f((u0+u1)/2)·τ(u0, u1)`: the observable at the
/// midpoint of the straight path from `u0` to `u1`, times transport along it.
/// Acting on polarized states it reproduces [`quantize_full`].
pub fn kernel_of(f: &Observable, spec: GridSpec, hbar: Planck) -> Result<OperatorKernel> {
    if spec.n > KERNEL_MAX_N {
        return Err(Error::KernelTooLarge(spec.n));
    }
    spec.check_resolution(hbar)?;
    let n = spec.n;
    let hb = hbar.get();
    let e = phase_table(&spec, hb);
    let fh = half_lattice(f, &spec);
    let m = 2 * n - 1;
    let norm = 1.0 / (4.0 * std::f64::consts::PI * hb);
    let values = DMatrix::from_fn(n * n, n * n, |r, c| {
        let (i1, j1) = (r / n, r % n);
        let (i0, j0) = (c / n, c % n);
        fh[(i0 + i1) * m + j0 + j1] * e[i0 * n + j1] * e[j0 * n + i1].conj() * norm
    });
    Ok(OperatorKernel { spec, hbar, values })
}

pub fn apply_kernel(k: &OperatorKernel, psi: &GridSection) -> Result<GridSection> {
    if psi.spec() != k.spec || psi.hbar() != k.hbar {
        return Err(Error::SpecMismatch);
    }
    let w = k.spec.weights2();
    let x = psi.values();
    let values: Vec<Complex64> =
        (0..x.len()).into_par_iter().map(|r| (0..x.len()).map(|c| k.values[(r, c)] * w[c] * x[c]).sum()).collect();
    GridSection::new(k.spec, k.hbar, values)
}

/// Fourth-order first derivative of a uniformly sampled line; five-point
/// one-sided stencils at the two outermost samples on each end.
pub(crate) fn derivative_1d(line: &[Complex64], h: f64) -> Vec<Complex64> {
    const EDGE0: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
    const EDGE1: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];
    let n = line.len();
    let stencil = |base: usize, c: &[f64; 5], dir: f64| -> Complex64 {
        (0..5)
            .map(|t| {
                let idx = if dir > 0.0 { base + t } else { base - t };
                line[idx] * c[t]
            })
            .sum::<Complex64>()
            * (dir / (12.0 * h))
    };
    (0..n)
        .map(|k| match k {
            0 => stencil(0, &EDGE0, 1.0),
            1 => stencil(0, &EDGE1, 1.0),
            _ if k == n - 1 => stencil(n - 1, &EDGE0, -1.0),
            _ if k == n - 2 => stencil(n - 1, &EDGE1, -1.0),
            _ => (line[k - 2] - line[k - 1] * 8.0 + line[k + 1] * 8.0 - line[k + 2]) / (12.0 * h),
        })
        .collect()
}

/// Derivative of row-major grid samples along p (rows) or q (columns).
fn derivative(values: &[Complex64], n: usize, h: f64, along_p: bool) -> Vec<Complex64> {
    let mut out = vec![ZERO; n * n];
    for a in 0..n {
        let idx = |t: usize| if along_p { t * n + a } else { a * n + t };
        let line: Vec<Complex64> = (0..n).map(|t| values[idx(t)]).collect();
        for (t, d) in derivative_1d(&line, h).into_iter().enumerate() {
            out[idx(t)] = d;
        }
    }
    out
}

/// Kostant-Souriau operator `(ħ/i)∇_{X_f} + f` with `∇ = d − (i/ħ)θ`,
/// `θ = (p dq − q dp)/2` and `X_f = f_p ∂_q − f_q ∂_p`:
///
/// `KS(f)Ψ = (ħ/i)(f_p Ψ_q − f_q Ψ_p) − ½(p f_p + q f_q)Ψ + fΨ`.
///
/// Only observables affine in p are accepted. The section need not decay.
pub fn ks_prequantize(f: &Observable, psi: &GridSection) -> Result<GridSection> {
    if f.envelope().is_some() {
        return Err(Error::NotPAffine);
    }
    if f.degree_in_p() > 1 {
        return Err(Error::NotPAffine);
    }
    let spec = psi.spec();
    let n = spec.n;
    let h = spec.spacing();
    let hb = psi.hbar().get();
    let dp = derivative(psi.values(), n, h, true);
    let dq = derivative(psi.values(), n, h, false);
    let pts = spec.points();
    let hbar_over_i = Complex64::new(0.0, -hb);
    let values = pts
        .iter()
        .enumerate()
        .map(|(k, &u)| {
            let (fp, fq) = f.gradient(u);
            let theta = (fp * u.p + fq * u.q) * 0.5;
            hbar_over_i * (fp * dq[k] - fq * dp[k]) + (f.eval(u) - theta) * psi.values()[k]
        })
        .collect();
    GridSection::new(spec, psi.hbar(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_polarized_profile, LinearPolarization, Profile};

    fn h1() -> Planck {
        Planck::new(1.0).unwrap()
    }

    #[test]
    fn derivative_stencil_is_fourth_order_exact_on_quartics() {
        let spec = GridSpec::new(2.0, 12).unwrap();
        let s = GridSection::from_fn(spec, h1(), |u| Complex64::new(u.p.powi(4) - u.q.powi(3), u.p * u.q)).unwrap();
        let dp = derivative(s.values(), spec.n, spec.spacing(), true);
        for (k, u) in spec.points().iter().enumerate() {
            let want = Complex64::new(4.0 * u.p.powi(3), u.q);
            assert!((dp[k] - want).norm() < 1e-10, "{k}: {} vs {}", dp[k], want);
        }
    }

    #[test]
    fn ks_rejects_quadratic_in_p() {
        let spec = GridSpec::new(10.0, 16).unwrap();
        let s = GridSection::zeros(spec, h1());
        assert!(matches!(ks_prequantize(&Observable::monomial(2, 0, 1.0), &s), Err(Error::NotPAffine)));
        assert!(ks_prequantize(&Observable::monomial(1, 2, 1.0), &s).is_ok());
    }

    #[test]
    fn identity_on_ground_state() {
        let spec = GridSpec::new(10.0, 48).unwrap();
        let pol = LinearPolarization::complexified(1.0, 0.0).unwrap();
        let s = make_polarized_profile(&pol, &Profile::natural_hermite(0, 1.0, h1()), spec, h1()).unwrap();
        let q1 = quantize_full(&Observable::constant(1.0), &s).unwrap();
        assert!(q1.relative_error(&s).unwrap() < 1e-8);
    }

    #[test]
    fn kernel_cap() {
        let spec = GridSpec::new(10.0, 64).unwrap();
        assert!(matches!(kernel_of(&Observable::constant(1.0), spec, h1()), Err(Error::KernelTooLarge(64))));
    }
}
