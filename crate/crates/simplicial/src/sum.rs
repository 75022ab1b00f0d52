use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cochain::{triangle_rule, van_est, DiagonalCochain, GL8};
use crate::error::{Result, SimplicialError};
use crate::triangulation::{barycentric_subdivide, Simplex, Triangulation};
use crate::Coord;

pub const MAX_LEVELS: usize = 6;
const MAX_SIMPLICES: usize = 5_000_000;
const CHUNK: usize = 2048;

fn check_arity(omega: &DiagonalCochain, dim: usize) -> Result<()> {
    if omega.arity() != dim + 1 {
        return Err(SimplicialError::ArityMismatch { expected: dim + 1, found: omega.arity() });
    }
    Ok(())
}

/// Chunked partial sums reduced in a fixed order, so the result does not
/// depend on the thread count.
fn chunked_sum(simplices: &[Simplex], term: impl Fn(&Simplex) -> Result<Complex64> + Sync) -> Result<Complex64> {
    let partial: Vec<Complex64> =
        simplices.par_chunks(CHUNK).map(|c| c.iter().map(&term).sum::<Result<Complex64>>()).collect::<Result<_>>()?;
    Ok(partial.into_iter().sum())
}

fn sum_over(omega: &DiagonalCochain, dim: usize, vertices: &[Coord], simplices: &[Simplex]) -> Result<Complex64> {
    check_arity(omega, dim)?;
    chunked_sum(simplices, |s| {
        let pts: Vec<Coord> = s.vertices.iter().map(|&i| vertices[i]).collect();
        Ok(omega.eval(&pts) * s.orientation as f64)
    })
}

/// `Σ_Δ Ω(Δ)` over the top simplices, each in its oriented vertex order.
pub fn riemann_sum(omega: &DiagonalCochain, tri: &Triangulation) -> Result<Complex64> {
    sum_over(omega, tri.dimension(), tri.vertices(), tri.simplices())
}

/// Riemann sum over the induced boundary triangulation.
pub fn boundary_sum(omega: &DiagonalCochain, tri: &Triangulation) -> Result<Complex64> {
    sum_over(omega, tri.dimension() - 1, tri.vertices(), tri.boundary())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelValue {
    pub level: usize,
    pub simplex_count: usize,
    pub max_diameter: f64,
    pub value: Complex64,
}

/// Riemann sums on `tri` and its first `levels` barycentric subdivisions.
pub fn converge(omega: &DiagonalCochain, tri: &Triangulation, levels: usize) -> Result<Vec<LevelValue>> {
    check_arity(omega, tri.dimension())?;
    let growth = (1..=tri.dimension() + 1).product::<usize>();
    let final_count = tri.simplices().len().saturating_mul(growth.saturating_pow(levels as u32));
    if levels > MAX_LEVELS || final_count > MAX_SIMPLICES {
        return Err(SimplicialError::ResourceBound { levels, max: MAX_LEVELS });
    }
    let mut out = Vec::with_capacity(levels + 1);
    let mut t = tri.clone();
    for level in 0..=levels {
        if level > 0 {
            t = barycentric_subdivide(&t);
        }
        out.push(LevelValue {
            level,
            simplex_count: t.simplices().len(),
            max_diameter: t.max_diameter(),
            value: riemann_sum(omega, &t)?,
        });
    }
    Ok(out)
}

fn integrate_over(omega: &DiagonalCochain, dim: usize, vertices: &[Coord], simplices: &[Simplex]) -> Result<Complex64> {
    check_arity(omega, dim)?;
    let tri_rule = triangle_rule();
    chunked_sum(simplices, |s| {
        let p: Vec<Coord> = s.vertices.iter().map(|&i| vertices[i]).collect();
        let o = s.orientation as f64;
        match dim {
            0 => Ok(omega.eval(&p) * o),
            1 => {
                let d = [p[1][0] - p[0][0], p[1][1] - p[0][1]];
                let mut acc = Complex64::new(0.0, 0.0);
                for &(t, w) in &GL8 {
                    acc += van_est(omega, [p[0][0] + t * d[0], p[0][1] + t * d[1]], &[d])? * w;
                }
                Ok(acc * o)
            }
            _ => {
                let e1 = [p[1][0] - p[0][0], p[1][1] - p[0][1]];
                let e2 = [p[2][0] - p[0][0], p[2][1] - p[0][1]];
                let mut acc = Complex64::new(0.0, 0.0);
                for &(s, t, w) in &tri_rule {
                    let m = [p[0][0] + s * e1[0] + t * e2[0], p[0][1] + s * e1[1] + t * e2[1]];
                    acc += van_est(omega, m, &[e1, e2])? * w;
                }
                Ok(acc * o)
            }
        }
    })
}

/// `∫_M VE_0(Ω)` by Gauss quadrature of the van Est form on each simplex.
pub fn integrate_van_est(omega: &DiagonalCochain, tri: &Triangulation) -> Result<Complex64> {
    integrate_over(omega, tri.dimension(), tri.vertices(), tri.simplices())
}

/// `∫_∂M VE_0(Ω)` over the boundary.
pub fn integrate_van_est_boundary(omega: &DiagonalCochain, tri: &Triangulation) -> Result<Complex64> {
    integrate_over(omega, tri.dimension() - 1, tri.vertices(), tri.boundary())
}

/// Interior cochain on M and boundary cochain on ∂M satisfying
/// `δΩ_M = 0` and `Ω_M|∂M = δΩ_∂M` near the diagonal.
#[derive(Debug, Clone)]
pub struct ClosedPair {
    interior: DiagonalCochain,
    boundary: DiagonalCochain,
}

const CLOSED_TOL: f64 = 1e-10;
const CLOSED_SAMPLES: usize = 64;

fn random_point(pts: &[Coord], rng: &mut impl Rng) -> Coord {
    let mut w: Vec<f64> = (0..pts.len()).map(|_| rng.gen_range(0.05..1.0)).collect();
    let tot: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= tot);
    pts.iter().zip(&w).fold([0.0, 0.0], |a, (p, &c)| [a[0] + c * p[0], a[1] + c * p[1]])
}

impl ClosedPair {
    /// Checks both closedness conditions on random near-diagonal tuples
    /// supported in simplices of `tri`.
    pub fn new(interior: DiagonalCochain, boundary: DiagonalCochain, tri: &Triangulation, seed: u64) -> Result<Self> {
        let n = tri.dimension();
        check_arity(&interior, n)?;
        check_arity(&boundary, n - 1)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d_int = interior.coboundary();
        for _ in 0..CLOSED_SAMPLES {
            let s = &tri.simplices()[rng.gen_range(0..tri.simplices().len())];
            let pts = tri.points(s);
            let tuple: Vec<Coord> = (0..n + 2).map(|_| random_point(&pts, &mut rng)).collect();
            let r = d_int.eval(&tuple).norm();
            if r > CLOSED_TOL * scale(&interior, &tuple) {
                return Err(SimplicialError::NotClosed { condition: "interior coboundary", residual: r });
            }
        }
        let d_bdy = boundary.coboundary();
        for _ in 0..CLOSED_SAMPLES {
            let s = &tri.boundary()[rng.gen_range(0..tri.boundary().len())];
            let pts = tri.points(s);
            let tuple: Vec<Coord> = (0..n + 1).map(|_| random_point(&pts, &mut rng)).collect();
            let r = (interior.eval(&tuple) - d_bdy.eval(&tuple)).norm();
            if r > CLOSED_TOL * interior.eval(&tuple).norm().max(1.0) {
                return Err(SimplicialError::NotClosed { condition: "boundary restriction", residual: r });
            }
        }
        Ok(Self { interior, boundary })
    }

    pub fn interior(&self) -> &DiagonalCochain {
        &self.interior
    }

    pub fn boundary(&self) -> &DiagonalCochain {
        &self.boundary
    }
}

/// Magnitude of the faces entering a coboundary, used to scale tolerances.
fn scale(omega: &DiagonalCochain, tuple: &[Coord]) -> f64 {
    let mut m = 1.0f64;
    let mut buf = Vec::with_capacity(tuple.len() - 1);
    for i in 0..tuple.len() {
        buf.clear();
        buf.extend(tuple.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x));
        m = m.max(omega.eval(&buf).norm());
    }
    m
}

/// `(Σ_M Ω_M − Σ_∂M Ω_∂M, ∫_M VE_0(Ω_M) − ∫_∂M VE_0(Ω_∂M))`.
pub fn stokes_pair(pair: &ClosedPair, tri: &Triangulation) -> Result<(Complex64, Complex64)> {
    let lhs = riemann_sum(&pair.interior, tri)? - boundary_sum(&pair.boundary, tri)?;
    let rhs = integrate_van_est(&pair.interior, tri)? - integrate_van_est_boundary(&pair.boundary, tri)?;
    Ok((lhs, rhs))
}
