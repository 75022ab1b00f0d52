//! Weyl-ordered reference operators.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::Planck;
use crate::observable::{Observable, MAX_DEGREE};
use crate::quantizer::derivative_1d;
use crate::states::{LinearPolarization, Profile};

/// All distinct orderings of `a` copies of `p̂` and `b` copies of `q̂`;
/// `true` marks `p̂`.
fn words(a: usize, b: usize) -> Vec<Vec<bool>> {
    if a == 0 {
        return vec![vec![false; b]];
    }
    if b == 0 {
        return vec![vec![true; a]];
    }
    let mut out = Vec::new();
    for mut w in words(a - 1, b) {
        w.insert(0, true);
        out.push(w);
    }
    for mut w in words(a, b - 1) {
        w.insert(0, false);
        out.push(w);
    }
    out
}

fn check_poly(f: &Observable) -> Result<()> {
    if f.envelope().is_some() {
        return Err(Error::NotPolynomial);
    }
    if f.degree() > MAX_DEGREE {
        return Err(Error::DegreeBound(f.degree()));
    }
    Ok(())
}

fn weyl_sum<T: Clone>(
    f: &Observable,
    input: &T,
    zero: T,
    apply_p: impl Fn(&T) -> T,
    apply_q: impl Fn(&T) -> T,
    add_scaled: impl Fn(&T, &T, Complex64) -> T,
) -> T {
    let mut acc = zero;
    for (a, b, c) in f.terms() {
        let ws = words(a as usize, b as usize);
        let weight = c / ws.len() as f64;
        for w in &ws {
            let mut v = input.clone();
            for &is_p in w.iter().rev() {
                v = if is_p { apply_p(&v) } else { apply_q(&v) };
            }
            acc = add_scaled(&acc, &v, weight);
        }
    }
    acc
}

/// Weyl quantization acting on the profile of a polarized state.
///
/// In the leaf coordinate `X = ap + bq` the operators are `X̂ = X` and
/// `Ŷ = iħ d/dX`, and `p̂ = dX̂ − bŶ`, `q̂ = −cX̂ + aŶ`. Profiles are
/// polynomial times Gaussian, so the result is exact.
pub fn weyl_profile(f: &Observable, pol: &LinearPolarization, psi: &Profile, hbar: Planck) -> Result<Profile> {
    check_poly(f)?;
    let ih = Complex64::new(0.0, hbar.get());
    let w = psi.width2;
    let xop = |p: &Profile| Profile::new(p.poly.mul_x(), w);
    let yop = |p: &Profile| Profile::new(p.poly.derivative().sub(&p.poly.mul_x().scale(1.0 / w)).scale(ih), w);
    let comb =
        |s: Complex64, u: &Profile, t: Complex64, v: &Profile| Profile::new(u.poly.scale(s).add(&v.poly.scale(t)), w);
    let pop = |p: &Profile| comb(pol.d, &xop(p), -pol.b, &yop(p));
    let qop = |p: &Profile| comb(-pol.c, &xop(p), pol.a, &yop(p));
    let zero = Profile::new(crate::poly::Poly1::zero(), w);
    Ok(weyl_sum(f, psi, zero, pop, qop, |acc, v, c| comb(Complex64::new(1.0, 0.0), acc, c, v)))
}

/// Weyl quantization in the position representation on uniform samples,
/// `q̂ = x`, `p̂ = (ħ/i) d/dx` by fourth-order differences.
pub fn weyl_oracle(f: &Observable, samples: &[Complex64], x0: f64, dx: f64, hbar: Planck) -> Result<Vec<Complex64>> {
    check_poly(f)?;
    if samples.len() < 5 {
        return Err(Error::InvalidGrid("need at least 5 samples".into()));
    }
    let hb = hbar.get();
    let xs: Vec<f64> = (0..samples.len()).map(|k| x0 + k as f64 * dx).collect();
    let pop =
        |v: &Vec<Complex64>| derivative_1d(v, dx).into_iter().map(|d| d * Complex64::new(0.0, -hb)).collect::<Vec<_>>();
    let qop = |v: &Vec<Complex64>| v.iter().zip(&xs).map(|(a, &x)| a * x).collect::<Vec<_>>();
    let zero = vec![Complex64::new(0.0, 0.0); samples.len()];
    Ok(weyl_sum(f, &samples.to_vec(), zero, pop, qop, |acc, v, c| acc.iter().zip(v).map(|(a, b)| a + b * c).collect()))
}
