//! Triangle-area star product.
//!
//! `(f⋆g)(m) = C ∫∫ f(u) g(v) exp(iκ·Ω(m,u,v)/ħ) du dv` with `κ = −4` and
//! `C = 1/(πħ)²`. In offsets `u = m + a`, `v = m + b` the phase is
//! `exp(−2iσ(a,b)/ħ)`. The inner integral runs over the operand with a
//! Gaussian envelope; two pure polynomials are regularized by
//! `exp(−ε|a|² − ε|b|²)` and extrapolated to ε → 0.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{PhasePoint, Planck};
use crate::observable::{Observable, MAX_DEGREE};

/// Coefficient of `Ω(m,u,v)/ħ` in the phase.
pub const AREA_FACTOR: f64 = -4.0;

/// Regularization ladder for polynomial pairs.
pub const EPSILONS: [f64; 3] = [0.1, 0.05, 0.025];

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const MAX_OUTER_POINTS: usize = 1025;

/// Trapezoid rule for the inner integral: `inner_points` per axis over
/// `±range_widths` envelope widths. The outer window uses the same width count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quadrature {
    pub inner_points: usize,
    pub range_widths: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self { inner_points: 104, range_widths: 8.5 }
    }
}

pub fn normalization(hbar: Planck) -> f64 {
    (AREA_FACTOR.abs() / (4.0 * std::f64::consts::PI * hbar.get())).powi(2)
}

/// A function entering the star product, with its envelope (center, width)
/// when it has one.
pub struct StarOperand<'a> {
    eval: Box<dyn Fn(PhasePoint) -> Complex64 + Sync + 'a>,
    envelope: Option<(PhasePoint, f64)>,
}

impl<'a> StarOperand<'a> {
    pub fn from_observable(f: &'a Observable) -> Self {
        Self { eval: Box::new(move |u| f.eval(u)), envelope: f.envelope().map(|s| (PhasePoint::ORIGIN, s)) }
    }

    pub fn from_fn(f: impl Fn(PhasePoint) -> Complex64 + Sync + 'a, center: PhasePoint, width: f64) -> Self {
        Self { eval: Box::new(f), envelope: Some((center, width)) }
    }

    pub fn envelope(&self) -> Option<(PhasePoint, f64)> {
        self.envelope
    }

    pub fn eval(&self, u: PhasePoint) -> Complex64 {
        (self.eval)(u)
    }
}

/// Width of the Gaussian `f⋆g` for centered isotropic envelopes of widths
/// `s` and `t`: with `a = 1/2s²`, `b = 1/2t²` the product has exponent
/// `(a + b)/(1 + abħ²)`.
pub fn product_width(s: f64, t: f64, hbar: Planck) -> f64 {
    let (a, b) = (0.5 / (s * s), 0.5 / (t * t));
    let h = hbar.get();
    ((1.0 + a * b * h * h) / (2.0 * (a + b))).sqrt()
}

struct Side<'a, 'b> {
    op: &'b StarOperand<'a>,
    /// Envelope in offset coordinates, or the regularization width.
    center: PhasePoint,
    width: f64,
    reg: Option<f64>,
}

impl Side<'_, '_> {
    fn value(&self, m: PhasePoint, x: PhasePoint) -> Complex64 {
        let v = self.op.eval(m + x);
        match self.reg {
            Some(eps) => v * (-eps * x.norm_sqr()).exp(),
            None => v,
        }
    }
}

fn nodes(center: f64, half: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = 2.0 * half / (n - 1) as f64;
    let x = (0..n).map(|k| center - half + k as f64 * h).collect();
    let w = (0..n).map(|k| if k == 0 || k == n - 1 { 0.5 * h } else { h }).collect();
    (x, w)
}

/// `∫ φ_out(x) ∫ φ_in(y) exp(i·s·σ(x,y)) dy dx` on offset grids.
fn double_integral(
    outer: &Side,
    inner: &Side,
    m: PhasePoint,
    s: f64,
    hbar: f64,
    quad: &Quadrature,
) -> Result<Complex64> {
    let ni = quad.inner_points;
    let r_in = quad.range_widths * inner.width;
    let (yp, wy) = nodes(inner.center.p, r_in, ni);
    let (yq, _) = nodes(inner.center.q, r_in, ni);
    let r_out = quad.range_widths * hbar / (2.0 * inner.width);
    let freq = s.abs() * inner.center.norm_sqr().sqrt() + 4.0 / (hbar / (2.0 * inner.width)) + 4.0 / outer.width;
    let h_out = std::f64::consts::PI / (2.0 * freq);
    let n_out = ((2.0 * r_out / h_out).ceil() as usize + 1).max(33);
    if n_out > MAX_OUTER_POINTS {
        return Err(Error::StarConvergence(format!("outer grid needs {n_out} points per axis")));
    }
    let (x, wx) = nodes(0.0, r_out, n_out);
    let phi: Vec<Complex64> = (0..ni * ni)
        .into_par_iter()
        .map(|k| inner.value(m, PhasePoint::new(yp[k / ni], yq[k % ni])) * wy[k / ni] * wy[k % ni])
        .collect();
    let outer_vals: Vec<Complex64> = (0..n_out * n_out)
        .into_par_iter()
        .map(|k| outer.value(m, PhasePoint::new(x[k / n_out], x[k % n_out])) * wx[k / n_out] * wx[k % n_out])
        .collect();
    let e1: Vec<Complex64> = (0..n_out * ni).map(|k| Complex64::from_polar(1.0, s * x[k / ni] * yq[k % ni])).collect();
    let e2: Vec<Complex64> = (0..n_out * ni).map(|k| Complex64::from_polar(1.0, -s * x[k / ni] * yp[k % ni])).collect();
    // t1[xp][yp] = Σ_yq φ(yp,yq) exp(i s x_p y_q)
    let mut t1 = vec![ZERO; n_out * ni];
    for b in 0..n_out {
        let row = &e1[b * ni..(b + 1) * ni];
        for a in 0..ni {
            let ph = &phi[a * ni..(a + 1) * ni];
            t1[b * ni + a] = ph.iter().zip(row).map(|(u, v)| u * v).sum();
        }
    }
    let mut total = ZERO;
    for b in 0..n_out {
        let t = &t1[b * ni..(b + 1) * ni];
        for d in 0..n_out {
            let g: Complex64 = t.iter().zip(&e2[d * ni..(d + 1) * ni]).map(|(u, v)| u * v).sum();
            total += outer_vals[b * n_out + d] * g;
        }
    }
    Ok(total)
}

fn side<'a, 'b>(op: &'b StarOperand<'a>, m: PhasePoint, reg: Option<f64>) -> Side<'a, 'b> {
    match (op.envelope, reg) {
        (Some((c, w)), _) => Side { op, center: c - m, width: w, reg: None },
        (None, Some(eps)) => Side { op, center: PhasePoint::ORIGIN, width: (0.5 / eps).sqrt(), reg: Some(eps) },
        (None, None) => Side { op, center: PhasePoint::ORIGIN, width: f64::INFINITY, reg: None },
    }
}

fn star_once(
    f: &StarOperand,
    g: &StarOperand,
    m: PhasePoint,
    hbar: Planck,
    reg: Option<f64>,
    quad: &Quadrature,
) -> Result<Complex64> {
    let hb = hbar.get();
    let fs = side(f, m, reg);
    let gs = side(g, m, reg);
    let kappa = 2.0 / hb;
    // exp(−iκσ(a,b)) with a the f offset; equal to exp(+iκσ(b,a)).
    let v = if gs.width.is_finite() && (gs.width >= fs.width || !fs.width.is_finite()) {
        double_integral(&fs, &gs, m, -kappa, hb, quad)?
    } else if fs.width.is_finite() {
        double_integral(&gs, &fs, m, kappa, hb, quad)?
    } else {
        return Err(Error::StarConvergence("no envelope and no regularization".into()));
    };
    Ok(v * normalization(hbar))
}

/// `(f⋆g)(m)` for general operands.
pub fn star_operands(f: &StarOperand, g: &StarOperand, m: PhasePoint, hbar: Planck) -> Result<Complex64> {
    star_operands_with(f, g, m, hbar, &Quadrature::default())
}

pub fn star_operands_with(
    f: &StarOperand,
    g: &StarOperand,
    m: PhasePoint,
    hbar: Planck,
    quad: &Quadrature,
) -> Result<Complex64> {
    if quad.inner_points < 8 || quad.range_widths.is_nan() || quad.range_widths <= 0.0 {
        return Err(Error::StarConvergence(format!("invalid quadrature {quad:?}")));
    }
    if f.envelope.is_some() || g.envelope.is_some() {
        return star_once(f, g, m, hbar, None, quad);
    }
    let v: Vec<Complex64> = EPSILONS.iter().map(|&e| star_once(f, g, m, hbar, Some(e), quad)).collect::<Result<_>>()?;
    // Error terms ε and ε²; ratio-2 ladder.
    let r1a = v[1] * 2.0 - v[0];
    let r1b = v[2] * 2.0 - v[1];
    Ok((r1b * 4.0 - r1a) / 3.0)
}

pub fn star(f: &Observable, g: &Observable, points: &[PhasePoint], hbar: Planck) -> Result<Vec<Complex64>> {
    let fo = StarOperand::from_observable(f);
    let go = StarOperand::from_observable(g);
    points.par_iter().map(|&m| star_operands(&fo, &go, m, hbar)).collect()
}

type PolyMap = BTreeMap<(u32, u32), Complex64>;

fn moyal_map(f: &Observable, g: &Observable, order: usize, hbar: Planck) -> Result<PolyMap> {
    if f.envelope().is_some() || g.envelope().is_some() {
        return Err(Error::NotPolynomial);
    }
    let mut out = PolyMap::new();
    let half = Complex64::new(0.0, 0.5 * hbar.get());
    let mut pref = Complex64::new(1.0, 0.0);
    for n in 0..=order {
        if n > 0 {
            pref = pref * half / n as f64;
        }
        let mut binom = 1.0;
        for k in 0..=n {
            if k > 0 {
                binom = binom * (n - k + 1) as f64 / k as f64;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let df = f.poly_derivative(k as u32, (n - k) as u32);
            let dg = g.poly_derivative((n - k) as u32, k as u32);
            for (a1, b1, c1) in df.terms() {
                for (a2, b2, c2) in dg.terms() {
                    *out.entry((a1 + a2, b1 + b2)).or_insert(ZERO) += pref * binom * sign * c1 * c2;
                }
            }
        }
    }
    out.retain(|_, c| *c != ZERO);
    Ok(out)
}

/// Moyal expansion `Σ_n (iħ/2)^n/n! Σ_k C(n,k)(−1)^k ∂_q^{n−k}∂_p^k f · ∂_p^{n−k}∂_q^k g`
/// truncated at `order`, evaluated at `points`.
pub fn moyal_series_oracle(
    f: &Observable,
    g: &Observable,
    order: usize,
    points: &[PhasePoint],
    hbar: Planck,
) -> Result<Vec<Complex64>> {
    let map = moyal_map(f, g, order, hbar)?;
    Ok(points
        .iter()
        .map(|u| map.iter().map(|(&(a, b), &c)| c * u.p.powi(a as i32) * u.q.powi(b as i32)).sum())
        .collect())
}

/// Exact Moyal product as an observable (degree ≤ 4).
pub fn moyal_product(f: &Observable, g: &Observable, hbar: Planck) -> Result<Observable> {
    let order = f.degree() + g.degree();
    let map = moyal_map(f, g, order, hbar)?;
    let terms: Vec<(u32, u32, Complex64)> = map.into_iter().map(|((a, b), c)| (a, b, c)).collect();
    Observable::new(&terms, None)
}

/// Fits the numerically computed `f⋆g` of two polynomials by a polynomial of
/// degree `deg f + deg g`.
pub fn star_polynomial(f: &Observable, g: &Observable, hbar: Planck) -> Result<Observable> {
    let deg = f.degree() + g.degree();
    if deg > MAX_DEGREE {
        return Err(Error::DegreeBound(deg));
    }
    let monos: Vec<(u32, u32)> = (0..=deg as u32).flat_map(|t| (0..=t).map(move |a| (a, t - a))).collect();
    let side: Vec<f64> = (0..7).map(|k| -1.5 + 0.5 * k as f64).collect();
    let pts: Vec<PhasePoint> = side.iter().flat_map(|&p| side.iter().map(move |&q| PhasePoint::new(p, q))).collect();
    let vals = star(f, g, &pts, hbar)?;
    let a = DMatrix::from_fn(pts.len(), monos.len(), |r, c| {
        let (i, j) = monos[c];
        Complex64::new(pts[r].p.powi(i as i32) * pts[r].q.powi(j as i32), 0.0)
    });
    let b = DVector::from_vec(vals);
    let x = a
        .svd(true, true)
        .solve(&b, 1e-12)
        .map_err(|e| Error::StarConvergence(format!("least-squares fit failed: {e}")))?;
    let terms: Vec<(u32, u32, Complex64)> = monos.iter().zip(x.iter()).map(|(&(i, j), &c)| (i, j, c)).collect();
    Observable::new(&terms, None)
}

/// Calibration record reported with star-product outputs.
#[derive(Debug, Clone, Serialize)]
pub struct Calibration {
    pub area_factor: f64,
    pub normalization: f64,
    /// `f(0)/(f⋆1)(0)·C` for a unit Gaussian `f`; equals `C` when calibrated.
    pub measured_normalization: f64,
    /// `(q⋆p − p⋆q)(0)/(iħ)`.
    pub measured_commutator_sign: f64,
}

pub fn calibrate(hbar: Planck) -> Result<Calibration> {
    let gauss = Observable::constant(1.0).with_envelope(1.0);
    let one = Observable::constant(1.0);
    let m = [PhasePoint::ORIGIN];
    let fs = star(&gauss, &one, &m, hbar)?[0];
    let c = normalization(hbar);
    let qp = star(&Observable::q(), &Observable::p(), &m, hbar)?[0];
    let pq = star(&Observable::p(), &Observable::q(), &m, hbar)?[0];
    Ok(Calibration {
        area_factor: AREA_FACTOR,
        normalization: c,
        measured_normalization: c / fs.re,
        measured_commutator_sign: ((qp - pq) / Complex64::new(0.0, hbar.get())).re,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(x: f64) -> Planck {
        Planck::new(x).unwrap()
    }

    #[test]
    fn moyal_order_zero_is_product() {
        let pts = [PhasePoint::new(0.3, -1.2)];
        let v = moyal_series_oracle(&Observable::q(), &Observable::monomial(2, 0, 1.0), 0, &pts, h(1.0)).unwrap();
        assert!((v[0] - Complex64::new(-1.2 * 0.09, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn moyal_q_star_p() {
        let m = moyal_product(&Observable::q(), &Observable::p(), h(0.7)).unwrap();
        let want = Observable::new(&[(1, 1, 1.0.into()), (0, 0, Complex64::new(0.0, 0.35))], None).unwrap();
        assert_eq!(m, want);
    }

    #[test]
    fn moyal_p2_star_q2() {
        let m = moyal_product(&Observable::monomial(2, 0, 1.0), &Observable::monomial(0, 2, 1.0), h(1.0)).unwrap();
        let want = Observable::new(
            &[(2, 2, 1.0.into()), (1, 1, Complex64::new(0.0, -2.0)), (0, 0, Complex64::new(-0.5, 0.0))],
            None,
        )
        .unwrap();
        assert_eq!(m, want);
    }
}
