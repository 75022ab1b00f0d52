//! Phase-plane primitives in the symmetric gauge θ = (p dq − q dp)/2.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sign `s` in `τ(u,v)·τ(v,z)·τ(z,u) = exp(i·s·Ω(u,v,z)/ħ)`.
pub const HOLONOMY_SIGN: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub p: f64,
    pub q: f64,
}

impl PhasePoint {
    pub const ORIGIN: PhasePoint = PhasePoint { p: 0.0, q: 0.0 };

    pub fn new(p: f64, q: f64) -> Self {
        Self { p, q }
    }

    pub fn checked(p: f64, q: f64) -> Result<Self> {
        if p.is_finite() && q.is_finite() {
            Ok(Self { p, q })
        } else {
            Err(Error::NonFinite("phase point"))
        }
    }

    pub fn norm_sqr(self) -> f64 {
        self.p * self.p + self.q * self.q
    }
}

impl std::ops::Add for PhasePoint {
    type Output = PhasePoint;
    fn add(self, o: PhasePoint) -> PhasePoint {
        PhasePoint::new(self.p + o.p, self.q + o.q)
    }
}

impl std::ops::Sub for PhasePoint {
    type Output = PhasePoint;
    fn sub(self, o: PhasePoint) -> PhasePoint {
        PhasePoint::new(self.p - o.p, self.q - o.q)
    }
}

impl std::ops::Mul<PhasePoint> for f64 {
    type Output = PhasePoint;
    fn mul(self, u: PhasePoint) -> PhasePoint {
        PhasePoint::new(self * u.p, self * u.q)
    }
}

/// Planck's constant, validated positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Planck(f64);

impl Planck {
    pub fn new(hbar: f64) -> Result<Self> {
        if hbar.is_finite() && hbar > 0.0 {
            Ok(Self(hbar))
        } else {
            Err(Error::InvalidHbar(hbar))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl Default for Planck {
    fn default() -> Self {
        Self(1.0)
    }
}

impl TryFrom<f64> for Planck {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Planck::new(v)
    }
}

impl From<Planck> for f64 {
    fn from(h: Planck) -> f64 {
        h.0
    }
}

/// `p0·q1 − q0·p1`.
pub fn symplectic_pairing(u0: PhasePoint, u1: PhasePoint) -> f64 {
    u0.p * u1.q - u0.q * u1.p
}

/// Signed area `½ σ(v − u, z − u)`; positive for counterclockwise (p, q) order.
pub fn triangle_area(u: PhasePoint, v: PhasePoint, z: PhasePoint) -> f64 {
    0.5 * symplectic_pairing(v - u, z - u)
}

/// Parallel transport of 1 along the straight segment from `u0` to `u1`.
pub fn transport_phase(u0: PhasePoint, u1: PhasePoint, hbar: Planck) -> Complex64 {
    Complex64::from_polar(1.0, symplectic_pairing(u0, u1) / (2.0 * hbar.get()))
}

/// Holonomy around the triangle (u, v, z).
pub fn holonomy(u: PhasePoint, v: PhasePoint, z: PhasePoint, hbar: Planck) -> Complex64 {
    Complex64::from_polar(1.0, HOLONOMY_SIGN * triangle_area(u, v, z) / hbar.get())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(p: f64, q: f64) -> PhasePoint {
        PhasePoint::new(p, q)
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(symplectic_pairing(pt(0.0, 0.0), pt(1.0, 1.0)), 0.0);
        assert_eq!(symplectic_pairing(pt(1.0, 0.0), pt(0.0, 1.0)), 1.0);
        assert_eq!(symplectic_pairing(pt(2.0, 3.0), pt(5.0, 7.0)), -1.0);
    }

    #[test]
    fn area_examples() {
        assert_eq!(triangle_area(pt(0.0, 0.0), pt(1.0, 0.0), pt(0.0, 1.0)), 0.5);
        assert_eq!(triangle_area(pt(1.0, 2.0), pt(1.0, 2.0), pt(-4.0, 0.3)), 0.0);
        assert_eq!(triangle_area(pt(0.0, 0.0), pt(2.0, 0.0), pt(0.0, 3.0)), 3.0);
    }

    #[test]
    fn transport_examples() {
        let h = Planck::new(1.0).unwrap();
        let u = pt(0.7, -1.3);
        assert_eq!(transport_phase(u, u, h), Complex64::new(1.0, 0.0));
        let t = transport_phase(pt(1.0, 0.0), pt(0.0, 1.0), h);
        assert!((t - Complex64::from_polar(1.0, 0.5)).norm() < 1e-15);
        let v = pt(-2.0, 0.4);
        assert!((transport_phase(v, u, h) - transport_phase(u, v, h).conj()).norm() < 1e-15);
    }

    #[test]
    fn planck_rejects_nonpositive() {
        assert!(Planck::new(0.0).is_err());
        assert!(Planck::new(-1.0).is_err());
        assert!(Planck::new(f64::NAN).is_err());
        assert!(PhasePoint::checked(f64::INFINITY, 0.0).is_err());
    }
}
