use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PhasePoint;

pub const MAX_DEGREE: usize = 4;

/// Polynomial in (p, q) times an optional isotropic Gaussian envelope
/// `exp(−(p² + q²)/(2s²))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    /// Keyed by `(exponent_p, exponent_q)`.
    terms: BTreeMap<(u32, u32), Complex64>,
    envelope: Option<f64>,
}

impl Observable {
    pub fn new(terms: &[(u32, u32, Complex64)], envelope: Option<f64>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for &(a, b, c) in terms {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::NonFinite("observable coefficient"));
            }
            *map.entry((a, b)).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        if let Some(s) = envelope {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::Format(format!("envelope width must be positive, got {s}")));
            }
        }
        let obs = Self::from_map(map, envelope);
        if obs.degree() > MAX_DEGREE {
            return Err(Error::DegreeBound(obs.degree()));
        }
        Ok(obs)
    }

    fn from_map(mut terms: BTreeMap<(u32, u32), Complex64>, envelope: Option<f64>) -> Self {
        terms.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Self { terms, envelope }
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn p() -> Self {
        Self::monomial(1, 0, 1.0)
    }

    pub fn q() -> Self {
        Self::monomial(0, 1, 1.0)
    }

    pub fn monomial(a: u32, b: u32, c: f64) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((a, b), Complex64::new(c, 0.0));
        Self::from_map(terms, None)
    }

    pub fn with_envelope(mut self, s: f64) -> Self {
        assert!(s > 0.0 && s.is_finite());
        self.envelope = Some(s);
        self
    }

    pub fn without_envelope(&self) -> Self {
        Self::from_map(self.terms.clone(), None)
    }

    pub fn envelope(&self) -> Option<f64> {
        self.envelope
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, Complex64)> + '_ {
        self.terms.iter().map(|(&(a, b), &c)| (a, b, c))
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|&(a, b)| (a + b) as usize).max().unwrap_or(0)
    }

    pub fn degree_in_p(&self) -> usize {
        self.terms.keys().map(|&(a, _)| a as usize).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Polynomial part only.
    pub fn poly_eval(&self, u: PhasePoint) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&(a, b), &c) in &self.terms {
            acc += c * u.p.powi(a as i32) * u.q.powi(b as i32);
        }
        acc
    }

    pub fn envelope_eval(&self, u: PhasePoint) -> f64 {
        match self.envelope {
            Some(s) => (-u.norm_sqr() / (2.0 * s * s)).exp(),
            None => 1.0,
        }
    }

    pub fn eval(&self, u: PhasePoint) -> Complex64 {
        self.poly_eval(u) * self.envelope_eval(u)
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.im == 0.0)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_map(self.terms.iter().map(|(&k, &c)| (k, c * s)).collect(), self.envelope)
    }

    /// Sum of two observables sharing the same envelope.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.envelope != other.envelope {
            return Err(Error::Format("cannot add observables with different envelopes".into()));
        }
        let mut terms = self.terms.clone();
        for (&k, &c) in &other.terms {
            *terms.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        Ok(Self::from_map(terms, self.envelope))
    }

    /// Polynomial product; fails on envelopes and on degree overflow.
    pub fn poly_mul(&self, other: &Self) -> Result<Self> {
        if self.envelope.is_some() || other.envelope.is_some() {
            return Err(Error::NotPolynomial);
        }
        let mut terms = BTreeMap::new();
        for (&(a1, b1), &c1) in &self.terms {
            for (&(a2, b2), &c2) in &other.terms {
                *terms.entry((a1 + a2, b1 + b2)).or_insert(Complex64::new(0.0, 0.0)) += c1 * c2;
            }
        }
        let out = Self::from_map(terms, None);
        if out.degree() > MAX_DEGREE {
            return Err(Error::DegreeBound(out.degree()));
        }
        Ok(out)
    }

    /// Derivative of the polynomial part, `∂_p^i ∂_q^j`.
    pub fn poly_derivative(&self, i: u32, j: u32) -> Self {
        let mut terms = BTreeMap::new();
        for (&(a, b), &c) in &self.terms {
            if a < i || b < j {
                continue;
            }
            let fa: f64 = ((a - i + 1)..=a).map(|x| x as f64).product();
            let fb: f64 = ((b - j + 1)..=b).map(|x| x as f64).product();
            terms.insert((a - i, b - j), c * fa * fb);
        }
        Self::from_map(terms, None)
    }

    /// Partial derivatives `(∂_p f, ∂_q f)` including the envelope.
    pub fn gradient(&self, u: PhasePoint) -> (Complex64, Complex64) {
        let dp = self.poly_derivative(1, 0).poly_eval(u);
        let dq = self.poly_derivative(0, 1).poly_eval(u);
        match self.envelope {
            None => (dp, dq),
            Some(s) => {
                let e = self.envelope_eval(u);
                let f = self.poly_eval(u);
                let s2 = s * s;
                ((dp - f * (u.p / s2)) * e, (dq - f * (u.q / s2)) * e)
            }
        }
    }
}

impl std::fmt::Display for Observable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (n, (&(a, b), c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({}{:+}i)", c.re, c.im)?;
            if a > 0 {
                write!(f, "·p^{a}")?;
            }
            if b > 0 {
                write!(f, "·q^{b}")?;
            }
        }
        if let Some(s) = self.envelope {
            write!(f, " · exp(-|u|²/(2·{s}²))")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_bound_enforced() {
        let c = Complex64::new(1.0, 0.0);
        assert!(Observable::new(&[(3, 2, c)], None).is_err());
        assert!(Observable::new(&[(2, 2, c)], None).is_ok());
        assert!(Observable::new(&[(1, 0, c)], Some(0.0)).is_err());
    }

    #[test]
    fn derivative_of_monomial() {
        let f = Observable::monomial(2, 3, 1.0);
        let d = f.poly_derivative(1, 2);
        let u = PhasePoint::new(1.5, -0.5);
        assert!((d.poly_eval(u) - Complex64::new(2.0 * 1.5 * 6.0 * -0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn gradient_with_envelope_matches_fd() {
        let f =
            Observable::new(&[(1, 1, Complex64::new(1.0, 0.5)), (0, 2, Complex64::new(2.0, 0.0))], Some(1.3)).unwrap();
        let u = PhasePoint::new(0.4, -0.9);
        let h = 1e-6;
        let (gp, gq) = f.gradient(u);
        let fdp = (f.eval(PhasePoint::new(u.p + h, u.q)) - f.eval(PhasePoint::new(u.p - h, u.q))) / (2.0 * h);
        let fdq = (f.eval(PhasePoint::new(u.p, u.q + h)) - f.eval(PhasePoint::new(u.p, u.q - h))) / (2.0 * h);
        assert!((gp - fdp).norm() < 1e-8);
        assert!((gq - fdq).norm() < 1e-8);
    }
}
