//! Sampled sections, polarized states, and the path-integral inner product.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{PhasePoint, Planck};
use crate::poly::{hermite_e, Poly1};

/// Relative boundary magnitude a state must decay to.
pub const DECAY_LIMIT: f64 = 1e-8;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub half_width: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("half width must be positive, got {half_width}")));
        }
        if n < 8 {
            return Err(Error::InvalidGrid(format!("need at least 8 points per axis, got {n}")));
        }
        Ok(Self { half_width, n })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.n - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.coord(i)).collect()
    }

    /// One-dimensional trapezoid weights.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n).map(|i| if i == 0 || i == self.n - 1 { 0.5 * h } else { h }).collect()
    }

    /// Row-major weights, `w_i·w_j` at flat index `i·n + j`.
    pub fn weights2(&self) -> Vec<f64> {
        let w = self.weights();
        let mut out = Vec::with_capacity(self.n * self.n);
        for &wi in &w {
            for &wj in &w {
                out.push(wi * wj);
            }
        }
        out
    }

    /// Grid point at row `i` (p index) and column `j` (q index).
    pub fn point(&self, i: usize, j: usize) -> PhasePoint {
        PhasePoint::new(self.coord(i), self.coord(j))
    }

    pub fn points(&self) -> Vec<PhasePoint> {
        let c = self.coords();
        let mut out = Vec::with_capacity(self.n * self.n);
        for &p in &c {
            for &q in &c {
                out.push(PhasePoint::new(p, q));
            }
        }
        out
    }

    pub fn is_boundary(&self, flat: usize) -> bool {
        let (i, j) = (flat / self.n, flat % self.n);
        i == 0 || j == 0 || i == self.n - 1 || j == self.n - 1
    }

    /// Rejects grids whose transport phase `exp(iσ(w,u)/2ħ)` oscillates with
    /// a wavelength `4πħ/L` shorter than two grid spacings.
    pub fn check_resolution(&self, hbar: Planck) -> Result<()> {
        let wavelength = 4.0 * std::f64::consts::PI * hbar.get() / self.half_width;
        let two_h = 2.0 * self.spacing();
        if wavelength < two_h {
            Err(Error::SpecTooCoarse { wavelength, two_h })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSection {
    spec: GridSpec,
    hbar: Planck,
    values: Vec<Complex64>,
}

impl GridSection {
    /// Wraps samples; only finiteness and shape are checked.
    pub fn new(spec: GridSpec, hbar: Planck, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.n * spec.n {
            return Err(Error::InvalidGrid(format!("expected {} samples, got {}", spec.n * spec.n, values.len())));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("section samples"));
        }
        Ok(Self { spec, hbar, values })
    }

    pub fn zeros(spec: GridSpec, hbar: Planck) -> Self {
        Self { spec, hbar, values: vec![ZERO; spec.n * spec.n] }
    }

    pub fn from_fn(spec: GridSpec, hbar: Planck, f: impl Fn(PhasePoint) -> Complex64 + Sync) -> Result<Self> {
        let values = spec.points().par_iter().map(|&u| f(u)).collect();
        Self::new(spec, hbar, values)
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn hbar(&self) -> Planck {
        self.hbar
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.spec.n + j]
    }

    /// `max_boundary |Ψ| / max |Ψ|`; zero for the zero section.
    pub fn boundary_ratio(&self) -> f64 {
        let mut inner = 0.0f64;
        let mut edge = 0.0f64;
        for (k, v) in self.values.iter().enumerate() {
            let a = v.norm();
            inner = inner.max(a);
            if self.spec.is_boundary(k) {
                edge = edge.max(a);
            }
        }
        if inner == 0.0 {
            0.0
        } else {
            edge / inner
        }
    }

    pub fn check_decay(&self) -> Result<()> {
        let ratio = self.boundary_ratio();
        if ratio > DECAY_LIMIT {
            Err(Error::BoundaryDecay { ratio, limit: DECAY_LIMIT })
        } else {
            Ok(())
        }
    }

    pub fn same_space(&self, other: &Self) -> Result<()> {
        if self.spec == other.spec && self.hbar == other.hbar {
            Ok(())
        } else {
            Err(Error::SpecMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { spec: self.spec, hbar: self.hbar, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|v| v * s)
    }

    pub fn zip(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self {
            spec: self.spec,
            hbar: self.hbar,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn l2_norm(&self) -> f64 {
        l2_inner(self, self).map(|v| v.re.max(0.0).sqrt()).unwrap_or(0.0)
    }

    /// Scaled to unit L² norm; the zero section is returned unchanged.
    pub fn normalized(&self) -> Self {
        let n = self.l2_norm();
        if n == 0.0 {
            self.clone()
        } else {
            self.scale(Complex64::new(1.0 / n, 0.0))
        }
    }

    /// `‖self − other‖ / ‖other‖` in L².
    pub fn relative_error(&self, reference: &Self) -> Result<f64> {
        let d = self.sub(reference)?.l2_norm();
        let r = reference.l2_norm();
        Ok(if r == 0.0 { d } else { d / r })
    }
}

/// Complex linear polarization `(a, b, c, d)` with `ad − bc = 1`.
///
/// Leaves are the level sets of `X = ap + bq`; polarized states are
/// `exp(iXY/2ħ)·ψ(X)` with `Y = cp + dq`. Real coefficients give states that
/// are constant in modulus along leaves, so sampled states use complexified
/// polarizations whose leaves are transverse to the real plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearPolarization {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl LinearPolarization {
    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::complex(a.into(), b.into(), c.into(), d.into())
    }

    pub fn complex(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        if (det - 1.0).norm() > 1e-12 {
            return Err(Error::InvalidPolarization(format!("ad − bc = {det}, expected 1")));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn vertical() -> Self {
        Self::real(1.0, 0.0, 0.0, 1.0).expect("unimodular")
    }

    pub fn horizontal() -> Self {
        Self::real(0.0, 1.0, -1.0, 0.0).expect("unimodular")
    }

    /// `[[1, iτ], [0, 1]]·R(θ)` with `R(θ) = [[cos θ, sin θ], [−sin θ, cos θ]]`.
    /// At `θ = 0` this deforms the vertical polarization, at `θ = π/2` the
    /// horizontal one; `τ = 1` is the Kähler polarization.
    pub fn complexified(tau: f64, angle: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidPolarization(format!("tau must be positive, got {tau}")));
        }
        let (s, c) = angle.sin_cos();
        let i = Complex64::i();
        Self::complex(c - i * tau * s, s + i * tau * c, (-s).into(), c.into())
    }

    pub fn x(&self, u: PhasePoint) -> Complex64 {
        self.a * u.p + self.b * u.q
    }

    pub fn y(&self, u: PhasePoint) -> Complex64 {
        self.c * u.p + self.d * u.q
    }

    pub fn is_real(&self) -> bool {
        [self.a, self.b, self.c, self.d].iter().all(|z| z.im == 0.0)
    }
}

/// One-variable profile `P(x)·exp(−x²/(2w))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub poly: Poly1,
    pub width2: Complex64,
}

impl Profile {
    pub fn new(poly: Poly1, width2: Complex64) -> Self {
        Self { poly, width2 }
    }

    pub fn gaussian(width2: f64) -> Self {
        Self::new(Poly1::constant(1.0.into()), width2.into())
    }

    /// `He_k(x/ℓ)·exp(−x²/(2ℓ²))` with `ℓ² = width2`.
    pub fn hermite(k: usize, width2: f64) -> Self {
        let ell = width2.sqrt();
        Self::new(hermite_e(k).rescale_arg((1.0 / ell).into()), width2.into())
    }

    /// Profile whose polarized state under `complexified(tau, _)` is the
    /// k-th Hermite state of the squeezed ground state.
    pub fn natural_hermite(k: usize, tau: f64, hbar: Planck) -> Self {
        Self::hermite(k, 2.0 * tau * hbar.get())
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.poly.eval(x) * (-x * x / (2.0 * self.width2)).exp()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.poly.scale(s), self.width2)
    }
}

/// `exp(iXY/2ħ)·ψ(X)` at a single point.
pub fn polarized_value(
    pol: &LinearPolarization,
    psi: impl Fn(Complex64) -> Complex64,
    u: PhasePoint,
    hbar: Planck,
) -> Complex64 {
    let x = pol.x(u);
    let y = pol.y(u);
    (Complex64::i() * x * y / (2.0 * hbar.get())).exp() * psi(x)
}

/// Samples a polarized state; fails if it does not decay on the grid.
pub fn make_polarized(
    pol: &LinearPolarization,
    psi: impl Fn(Complex64) -> Complex64 + Sync,
    spec: GridSpec,
    hbar: Planck,
) -> Result<GridSection> {
    let s = GridSection::from_fn(spec, hbar, |u| polarized_value(pol, &psi, u, hbar))?;
    s.check_decay()?;
    Ok(s)
}

pub fn make_polarized_profile(
    pol: &LinearPolarization,
    profile: &Profile,
    spec: GridSpec,
    hbar: Planck,
) -> Result<GridSection> {
    make_polarized(pol, |x| profile.eval(x), spec, hbar)
}

/// `(GΨ)(u) = (1/4πħ) ∫ Ψ(w) exp(iσ(w,u)/2ħ) dw`, a unitary involution whose
/// +1 eigenspace contains every polarized state.
pub fn symplectic_transform(psi: &GridSection) -> GridSection {
    let spec = psi.spec;
    let n = spec.n;
    let hb = psi.hbar.get();
    let x = spec.coords();
    let w = spec.weights();
    let phase: Vec<Complex64> =
        (0..n * n).map(|k| Complex64::from_polar(1.0, x[k / n] * x[k % n] / (2.0 * hb))).collect();
    // m1[i][b] = Σ_j w_j Ψ[i,j] exp(−i x_j x_b / 2ħ)
    let m1: Vec<Complex64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let row = &psi.values[i * n..(i + 1) * n];
            let (phase, w) = (&phase, &w);
            (0..n).map(move |b| {
                let mut acc = ZERO;
                for j in 0..n {
                    acc += row[j] * w[j] * phase[j * n + b].conj();
                }
                acc
            })
        })
        .collect();
    let norm = 1.0 / (4.0 * std::f64::consts::PI * hb);
    // out[b][a] = norm · Σ_i w_i exp(i x_i x_a / 2ħ) m1[i][b]
    let values: Vec<Complex64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|b| {
            let (phase, w, m1) = (&phase, &w, &m1);
            (0..n).map(move |a| {
                let mut acc = ZERO;
                for i in 0..n {
                    acc += phase[i * n + a] * w[i] * m1[i * n + b];
                }
                acc * norm
            })
        })
        .collect();
    GridSection { spec, hbar: psi.hbar, values }
}

/// Grid quadrature of `conj(Ψ1)·Ψ0`.
pub fn l2_inner(psi1: &GridSection, psi0: &GridSection) -> Result<Complex64> {
    psi1.same_space(psi0)?;
    let w = psi1.spec.weights2();
    Ok(psi1.values.iter().zip(&psi0.values).zip(&w).map(|((a, b), &wk)| a.conj() * b * wk).sum())
}

/// `(1/(2πħ)²) ∫∫ conj Ψ1(u1) Ψ0(u0) exp(iσ(u0,u1)/2ħ) du0 du1`.
///
/// The inner `u0` integral is the symplectic transform, so the value equals
/// `(1/πħ)·⟨Ψ1, GΨ0⟩_{L²}`.
pub fn pathintegral_inner(psi1: &GridSection, psi0: &GridSection) -> Result<Complex64> {
    psi1.same_space(psi0)?;
    let g = symplectic_transform(psi0);
    let hb = psi0.hbar.get();
    let factor = 4.0 * std::f64::consts::PI * hb / (2.0 * std::f64::consts::PI * hb).powi(2);
    Ok(l2_inner(psi1, &g)? * factor)
}

/// The constant relating the two inner products on polarized states, `1/(πħ)`.
pub fn lemma_constant(hbar: Planck) -> f64 {
    1.0 / (std::f64::consts::PI * hbar.get())
}

/// Ratio of the path-integral and L² norms of the Kähler ground state.
pub fn measure_lemma_constant(spec: GridSpec, hbar: Planck) -> Result<f64> {
    let pol = LinearPolarization::complexified(1.0, 0.0)?;
    let g = make_polarized_profile(&pol, &Profile::natural_hermite(0, 1.0, hbar), spec, hbar)?;
    let num = pathintegral_inner(&g, &g)?;
    let den = l2_inner(&g, &g)?;
    Ok((num / den).re)
}

/// Matrix of `⟨Ψ1|Ψ0⟩ = Σ_{jk} conj(Ψ1_j)·B_jk·Ψ0_k` written in the
/// weight-symmetrized basis `y = √W·Ψ`, so its eigenvalues are the values of
/// the form on L²-normalized sections.
pub fn form_matrix(spec: GridSpec, hbar: Planck) -> DMatrix<Complex64> {
    let pts = spec.points();
    let sw: Vec<f64> = spec.weights2().iter().map(|w| w.sqrt()).collect();
    let hb = hbar.get();
    let norm = 1.0 / (2.0 * std::f64::consts::PI * hb).powi(2);
    let m = pts.len();
    DMatrix::from_fn(m, m, |j, k| {
        let s = crate::geometry::symplectic_pairing(pts[k], pts[j]);
        Complex64::from_polar(norm * sw[j] * sw[k], s / (2.0 * hb))
    })
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub section: GridSection,
    /// `⟨Ψ|Ψ⟩` from [`pathintegral_inner`] with `‖Ψ‖_{L²} = 1`.
    pub value: f64,
    pub min_eigenvalue: f64,
    pub eigen_window: f64,
    pub window_dim: usize,
}

pub const WITNESS_MAX_N: usize = 32;

/// Finds a decaying section of negative path-integral norm.
///
/// The discretized form is diagonalized; inside the eigenspace of values
/// within a relative window of the most negative eigenvalue, the combination
/// with the least boundary mass is selected. Windows widen until the decay
/// invariant holds.
pub fn negative_norm_witness(spec: GridSpec, hbar: Planck) -> Result<Witness> {
    if spec.n > WITNESS_MAX_N {
        return Err(Error::WitnessSearch(format!("dense search capped at N = {WITNESS_MAX_N}")));
    }
    let eig = form_matrix(spec, hbar).symmetric_eigen();
    let lam_min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if lam_min >= 0.0 {
        return Err(Error::WitnessSearch(format!("form is positive semidefinite (min eigenvalue {lam_min:e})")));
    }
    let sw: Vec<f64> = spec.weights2().iter().map(|w| w.sqrt()).collect();
    let boundary: Vec<usize> = (0..sw.len()).filter(|&k| spec.is_boundary(k)).collect();
    for tol in [1e-9, 1e-6, 1e-4, 1e-3] {
        let cols: Vec<usize> =
            (0..eig.eigenvalues.len()).filter(|&k| eig.eigenvalues[k] <= lam_min + tol * lam_min.abs()).collect();
        let v = DMatrix::from_fn(sw.len(), cols.len(), |r, c| eig.eigenvectors[(r, cols[c])]);
        let bd = DMatrix::from_fn(boundary.len(), cols.len(), |r, c| v[(boundary[r], c)] / sw[boundary[r]]);
        let gram = bd.adjoint() * &bd;
        let ge = gram.symmetric_eigen();
        let best = (0..ge.eigenvalues.len())
            .min_by(|&a, &b| ge.eigenvalues[a].total_cmp(&ge.eigenvalues[b]))
            .expect("non-empty eigenspace");
        let coef: DVector<Complex64> = ge.eigenvectors.column(best).into_owned();
        let y = &v * coef;
        let values: Vec<Complex64> = (0..sw.len()).map(|k| y[k] / sw[k]).collect();
        let section = GridSection::new(spec, hbar, values)?.normalized();
        if section.check_decay().is_err() {
            continue;
        }
        let val = pathintegral_inner(&section, &section)?;
        if val.im.abs() > 1e-6 * val.re.abs() {
            return Err(Error::WitnessSearch(format!("self-pairing not real: {val}")));
        }
        return Ok(Witness {
            section,
            value: val.re,
            min_eigenvalue: lam_min,
            eigen_window: tol,
            window_dim: cols.len(),
        });
    }
    Err(Error::WitnessSearch("no decaying combination in the negative eigenspace".into()))
}

/// Gram-Schmidt in L², in order.
pub fn orthonormalize(states: &[GridSection]) -> Result<Vec<GridSection>> {
    let mut out: Vec<GridSection> = Vec::with_capacity(states.len());
    for s in states {
        let mut v = s.clone();
        for e in &out {
            let c = l2_inner(e, &v)?;
            v = v.sub(&e.scale(c))?;
        }
        if v.l2_norm() == 0.0 {
            return Err(Error::Format("linearly dependent states".into()));
        }
        out.push(v.normalized());
    }
    Ok(out)
}

/// `M_jk = pathintegral_inner(left_j, right_k)`.
pub fn pairing_matrix(left: &[GridSection], right: &[GridSection]) -> Result<DMatrix<Complex64>> {
    let g: Vec<GridSection> = right.iter().map(symplectic_transform).collect();
    let mut m = DMatrix::from_element(left.len(), right.len(), ZERO);
    let hb = right.first().map(|s| s.hbar.get()).unwrap_or(1.0);
    let factor = 4.0 * std::f64::consts::PI * hb / (2.0 * std::f64::consts::PI * hb).powi(2);
    for (j, l) in left.iter().enumerate() {
        for (k, r) in g.iter().enumerate() {
            m[(j, k)] = l2_inner(l, r)? * factor;
        }
    }
    Ok(m)
}
