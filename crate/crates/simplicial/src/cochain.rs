use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Result, SimplicialError};
use crate::triangulation::{permutations, signed_volume};
use crate::Coord;

type Evaluator = dyn Fn(&[Coord]) -> Complex64 + Send + Sync;

/// Function of `arity` points that vanishes on the diagonal and is invariant
/// under even permutations of its arguments.
#[derive(Clone)]
pub struct DiagonalCochain {
    arity: usize,
    eval: Arc<Evaluator>,
}

impl fmt::Debug for DiagonalCochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiagonalCochain").field("arity", &self.arity).finish_non_exhaustive()
    }
}

impl DiagonalCochain {
    pub fn new(arity: usize, eval: impl Fn(&[Coord]) -> Complex64 + Send + Sync + 'static) -> Self {
        assert!((1..=4).contains(&arity), "arity {arity} out of range");
        Self { arity, eval: Arc::new(eval) }
    }

    pub fn zero(arity: usize) -> Self {
        Self::new(arity, |_| Complex64::new(0.0, 0.0))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, pts: &[Coord]) -> Complex64 {
        debug_assert_eq!(pts.len(), self.arity);
        (self.eval)(pts)
    }

    /// `F(x, y) = f(x)(y − x)` on the line.
    pub fn left_point(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(2, move |p| Complex64::new(f(p[0][0]) * (p[1][0] - p[0][0]), 0.0))
    }

    /// `F(x, y) = f(y) − f(x)` on the line.
    pub fn increment(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(2, move |p| Complex64::new(f(p[1][0]) - f(p[0][0]), 0.0))
    }

    /// Signed area of the triangle `(x, y, z)`.
    pub fn signed_area() -> Self {
        Self::new(3, |p| Complex64::new(signed_volume(p), 0.0))
    }

    /// `½(x × y)`; its coboundary is the signed area.
    pub fn area_primitive() -> Self {
        Self::new(2, |p| Complex64::new(0.5 * (p[0][0] * p[1][1] - p[0][1] * p[1][0]), 0.0))
    }

    /// `δΩ(x_0, …, x_k) = Σ (−1)^i Ω(x_0, …, x̂_i, …, x_k)`.
    pub fn coboundary(&self) -> Self {
        let inner = self.clone();
        Self::new(self.arity + 1, move |p| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut buf = Vec::with_capacity(p.len() - 1);
            for i in 0..p.len() {
                buf.clear();
                buf.extend(p.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x));
                let v = inner.eval(&buf);
                if i % 2 == 0 {
                    acc += v;
                } else {
                    acc -= v;
                }
            }
            acc
        })
    }

    /// Randomized check of the diagonal and even-permutation invariants on
    /// points drawn from the box `[lo, hi]²` (second coordinate zero when
    /// `dimension` is 1).
    pub fn check_invariants(
        &self,
        dimension: usize,
        lo: f64,
        hi: f64,
        samples: usize,
        rng: &mut impl Rng,
    ) -> Result<()> {
        let mut point = || -> Coord {
            let y = if dimension == 1 { 0.0 } else { rng.gen_range(lo..hi) };
            [rng.gen_range(lo..hi), y]
        };
        for _ in 0..samples {
            let m = point();
            let d = self.eval(&vec![m; self.arity]).norm();
            if d > 1e-12 {
                return Err(SimplicialError::Invariant(format!("|Ω(m,…,m)| = {d:e} at {m:?}")));
            }
            let pts: Vec<Coord> = (0..self.arity).map(|_| point()).collect();
            let base = self.eval(&pts);
            for perm in even_permutations(self.arity) {
                let q: Vec<Coord> = perm.iter().map(|&i| pts[i]).collect();
                let diff = (self.eval(&q) - base).norm();
                if diff > 1e-10 * base.norm().max(1.0) {
                    return Err(SimplicialError::Invariant(format!(
                        "even permutation {perm:?} changes the value by {diff:e}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn even_permutations(n: usize) -> Vec<Vec<usize>> {
    match n {
        3 => vec![vec![1, 2, 0], vec![2, 0, 1]],
        4 => {
            let mut out = Vec::new();
            for p in permutations(4) {
                let inversions =
                    (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
                if inversions % 2 == 0 && p != [0, 1, 2, 3] {
                    out.push(p);
                }
            }
            out
        }
        _ => vec![],
    }
}

/// Eight-point Gauss-Legendre rule on `[0, 1]`.
pub(crate) const GL8: [(f64, f64); 8] = {
    const X: [f64; 4] =
        [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
    const W: [f64; 4] =
        [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];
    [
        (0.5 - 0.5 * X[3], 0.5 * W[3]),
        (0.5 - 0.5 * X[2], 0.5 * W[2]),
        (0.5 - 0.5 * X[1], 0.5 * W[1]),
        (0.5 - 0.5 * X[0], 0.5 * W[0]),
        (0.5 + 0.5 * X[0], 0.5 * W[0]),
        (0.5 + 0.5 * X[1], 0.5 * W[1]),
        (0.5 + 0.5 * X[2], 0.5 * W[2]),
        (0.5 + 0.5 * X[3], 0.5 * W[3]),
    ]
};

/// Nodes and weights on the standard triangle `{s, t ≥ 0, s + t ≤ 1}` by the
/// collapsed square map; weights sum to ½.
pub(crate) fn triangle_rule() -> Vec<(f64, f64, f64)> {
    let mut out = Vec::with_capacity(64);
    for &(u, wu) in &GL8 {
        for &(v, wv) in &GL8 {
            out.push((u, (1.0 - u) * v, wu * wv * (1.0 - u)));
        }
    }
    out
}

/// `Ω(x, y) = ∫_{[x,y]} α` for a 1-form `α = α_0 dx + α_1 dy`.
pub fn hull_cochain_1form(alpha: impl Fn(Coord) -> [Complex64; 2] + Send + Sync + 'static) -> DiagonalCochain {
    DiagonalCochain::new(2, move |p| {
        let d = [p[1][0] - p[0][0], p[1][1] - p[0][1]];
        GL8.iter()
            .map(|&(t, w)| {
                let a = alpha([p[0][0] + t * d[0], p[0][1] + t * d[1]]);
                (a[0] * d[0] + a[1] * d[1]) * w
            })
            .sum()
    })
}

/// `Ω(x, y, z) = ∫ ρ dx∧dy` over the oriented triangle `(x, y, z)`.
pub fn hull_cochain_2form(rho: impl Fn(Coord) -> Complex64 + Send + Sync + 'static) -> DiagonalCochain {
    let rule = triangle_rule();
    DiagonalCochain::new(3, move |p| {
        let e1 = [p[1][0] - p[0][0], p[1][1] - p[0][1]];
        let e2 = [p[2][0] - p[0][0], p[2][1] - p[0][1]];
        let jac = e1[0] * e2[1] - e1[1] * e2[0];
        let s: Complex64 = rule
            .iter()
            .map(|&(s, t, w)| rho([p[0][0] + s * e1[0] + t * e2[0], p[0][1] + s * e1[1] + t * e2[1]]) * w)
            .sum();
        s * jac
    })
}

/// `(φ*Ω)(x_0, …) = Ω(φ(x_0), …)`.
pub fn pullback_cochain(
    omega: &DiagonalCochain,
    map: impl Fn(Coord) -> Coord + Send + Sync + 'static,
) -> DiagonalCochain {
    let inner = omega.clone();
    DiagonalCochain::new(omega.arity, move |p| {
        let q: Vec<Coord> = p.iter().map(|&x| map(x)).collect();
        inner.eval(&q)
    })
}

const VE_STEP: f64 = 1e-3;

fn mixed_difference(omega: &DiagonalCochain, m: Coord, dirs: &[Coord], h: f64) -> Complex64 {
    let n = dirs.len();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut pts = vec![m; n + 1];
    for mask in 0..(1usize << n) {
        let mut sign = 1.0;
        for (i, d) in dirs.iter().enumerate() {
            let s = if mask >> i & 1 == 1 { -1.0 } else { 1.0 };
            sign *= s;
            pts[i + 1] = [m[0] + s * h * d[0], m[1] + s * h * d[1]];
        }
        acc += omega.eval(&pts) * sign;
    }
    acc / (2.0 * h).powi(n as i32)
}

/// Graded van Est map at `point`: `n!` times the mixed derivative of
/// `Ω(m, ·, …, ·)` along `directions[i]` in slot `i + 1`, by central
/// differences with one Richardson step.
pub fn van_est(omega: &DiagonalCochain, point: Coord, directions: &[Coord]) -> Result<Complex64> {
    let n = directions.len();
    if omega.arity != n + 1 {
        return Err(SimplicialError::ArityMismatch { expected: n + 1, found: omega.arity });
    }
    if n == 0 {
        return Ok(omega.eval(&[point]));
    }
    let coarse = mixed_difference(omega, point, directions, VE_STEP);
    let fine = mixed_difference(omega, point, directions, 0.5 * VE_STEP);
    let gap = (coarse - fine).norm();
    if !gap.is_finite() || gap > 1e-3 * fine.norm().max(1.0) {
        return Err(SimplicialError::VanEstNoise(gap));
    }
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    Ok((fine * 4.0 - coarse) / 3.0 * factorial)
}
