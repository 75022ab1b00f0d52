//! Dense univariate polynomials with complex coefficients.

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly1 {
    /// `coeffs[k]` multiplies `x^k`.
    pub coeffs: Vec<Complex64>,
}

impl Poly1 {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = Complex64::new(1.0, 0.0);
        Self { coeffs }
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if *c == Complex64::new(0.0, 0.0)) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect())
    }

    pub fn mul_x(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex64::new(0.0, 0.0));
        coeffs.extend_from_slice(&self.coeffs);
        Self { coeffs }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        Self::new(
            (0..n)
                .map(|k| self.coeffs.get(k).copied().unwrap_or(zero) + other.coeffs.get(k).copied().unwrap_or(zero))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// `P(s·x)`.
    pub fn rescale_arg(&self, s: Complex64) -> Self {
        let mut f = Complex64::new(1.0, 0.0);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for &c in &self.coeffs {
            out.push(c * f);
            f *= s;
        }
        Self::new(out)
    }
}

/// Probabilists' Hermite polynomial `He_k`.
pub fn hermite_e(k: usize) -> Poly1 {
    let mut prev = Poly1::constant(Complex64::new(1.0, 0.0));
    if k == 0 {
        return prev;
    }
    let mut cur = Poly1::monomial(1);
    for n in 1..k {
        let next = cur.mul_x().sub(&prev.scale(Complex64::new(n as f64, 0.0)));
        prev = cur;
        cur = next;
    }
    cur
}
