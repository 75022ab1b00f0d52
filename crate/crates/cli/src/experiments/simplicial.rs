use pathquant_simplicial::{
    boundary_sum, converge, riemann_sum, stokes_pair, ClosedPair, Complex64, DiagonalCochain, Triangulation,
};
use pathquant_stochastic::SmoothFn;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check, num, positive, Outcome, RunResult, Spec, Table};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RiemannConvergence {
    /// Intervals of the base triangulation of `[0, 1]`.
    pub base_intervals: usize,
    pub levels: usize,
    pub final_tolerance: f64,
    pub area_tolerance: f64,
}

impl Default for RiemannConvergence {
    fn default() -> Self {
        Self { base_intervals: 10, levels: 5, final_tolerance: 2e-3, area_tolerance: 1e-12 }
    }
}

impl Spec for RiemannConvergence {
    fn validate(&self) -> Result<(), String> {
        check(self.base_intervals >= 1, || "base_intervals must be positive".into())?;
        check(self.levels <= pathquant_simplicial::MAX_LEVELS, || {
            format!("levels must be at most {}", pathquant_simplicial::MAX_LEVELS)
        })?;
        positive("final_tolerance", self.final_tolerance)?;
        positive("area_tolerance", self.area_tolerance)
    }

    fn run(&self, _seed: u64) -> RunResult {
        let mut t = Table::new("levels", &["case", "level", "simplex_count", "max_diameter", "value", "error"]);
        let left = DiagonalCochain::left_point(|x| x * x);
        let base = Triangulation::interval(0.0, 1.0, self.base_intervals)?;
        let mut final_error = f64::NAN;
        for l in converge(&left, &base, self.levels)? {
            final_error = (l.value.re - 1.0 / 3.0).abs();
            t.push(vec![
                "left-point x^2".into(),
                l.level.to_string(),
                l.simplex_count.to_string(),
                num(l.max_diameter),
                num(l.value.re),
                num(final_error),
            ]);
        }
        let mut worst_area = 0.0f64;
        for l in converge(&DiagonalCochain::signed_area(), &Triangulation::unit_square(), self.levels)? {
            let err = (l.value - Complex64::new(1.0, 0.0)).norm();
            worst_area = worst_area.max(err);
            t.push(vec![
                "area unit square".into(),
                l.level.to_string(),
                l.simplex_count.to_string(),
                num(l.max_diameter),
                num(l.value.re),
                num(err),
            ]);
        }
        let mut out = Outcome { tables: vec![t], ..Default::default() };
        out.tolerance("final_tolerance", self.final_tolerance);
        out.tolerance("area_tolerance", self.area_tolerance);
        out.metric("final_error", final_error);
        out.metric("max_area_error", worst_area);
        out.passed = final_error <= self.final_tolerance && worst_area <= self.area_tolerance;
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StokesPair {
    pub function: SmoothFn,
    pub interval: [f64; 2],
    pub triangulations: usize,
    pub cuts: usize,
    pub disk_sides: usize,
    pub disk_refinements: usize,
    pub spread_tolerance: f64,
    pub circulation_tolerance: f64,
}

impl Default for StokesPair {
    fn default() -> Self {
        Self {
            function: SmoothFn::Sin { amplitude: 1.0, frequency: 2.0 },
            interval: [0.0, 1.5],
            triangulations: 5,
            cuts: 12,
            disk_sides: 16,
            disk_refinements: 25,
            spread_tolerance: 1e-10,
            circulation_tolerance: 1e-10,
        }
    }
}

impl Spec for StokesPair {
    fn validate(&self) -> Result<(), String> {
        self.function.validate().map_err(|e| e.to_string())?;
        let [a, b] = self.interval;
        check(a.is_finite() && b.is_finite() && a < b, || format!("invalid interval {:?}", self.interval))?;
        check(self.triangulations >= 1, || "triangulations must be positive".into())?;
        check(self.disk_sides >= 3, || "disk_sides must be at least 3".into())?;
        positive("spread_tolerance", self.spread_tolerance)?;
        positive("circulation_tolerance", self.circulation_tolerance)
    }

    /// Triangulation `j` refines with `ChaCha8Rng::seed_from_u64(seed)` on stream `j`.
    fn run(&self, seed: u64) -> RunResult {
        let rng = |j: usize| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            r.set_stream(j as u64);
            r
        };
        let mut t = Table::new(
            "pairs",
            &["case", "index", "simplex_count", "interior_sum", "boundary_sum", "analytic", "error", "lhs", "rhs_re"],
        );
        let [a, b] = self.interval;
        let f = self.function.clone();
        let g = f.clone();
        let increment = DiagonalCochain::increment(move |x| g.value(x));
        let exact = f.value(b) - f.value(a);
        let probe = Triangulation::interval(a, b, 4)?;
        let pair = ClosedPair::new(increment.clone(), DiagonalCochain::zero(1), &probe, seed)?;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut worst_exact = 0.0f64;
        for j in 0..self.triangulations {
            let tri = Triangulation::random_interval(a, b, self.cuts, &mut rng(j))?;
            let s = riemann_sum(&increment, &tri)?.re;
            let (lhs, rhs) = stokes_pair(&pair, &tri)?;
            lo = lo.min(s);
            hi = hi.max(s);
            worst_exact = worst_exact.max((s - exact).abs());
            t.push(vec![
                "interval increment".into(),
                j.to_string(),
                tri.simplices().len().to_string(),
                num(s),
                "0.0".into(),
                num(exact),
                num((s - exact).abs()),
                num(lhs.norm()),
                num(rhs.re),
            ]);
        }
        let k = self.disk_sides;
        let base = Triangulation::polygon(k, 1.0)?;
        let phi = |p: [f64; 2]| p[0] * p[0] * p[1] + p[0].sin();
        let primitive = DiagonalCochain::new(2, move |p| {
            Complex64::new(0.5 * (p[0][0] * p[1][1] - p[0][1] * p[1][0]) + phi(p[1]) - phi(p[0]), 0.0)
        });
        let interior = primitive.coboundary();
        let disk = ClosedPair::new(interior.clone(), primitive.clone(), &base, seed)?;
        // circulation of ½(x dy − y dx) + dφ around the inscribed polygon
        let circulation = 0.5 * k as f64 * (2.0 * std::f64::consts::PI / k as f64).sin();
        let mut worst_disk = 0.0f64;
        for j in 0..self.triangulations {
            let tri = base.refine_randomly(self.disk_refinements, &mut rng(self.triangulations + j))?;
            let s = riemann_sum(&interior, &tri)?;
            let bs = boundary_sum(&primitive, &tri)?;
            let (lhs, rhs) = stokes_pair(&disk, &tri)?;
            let err = (s - Complex64::new(circulation, 0.0)).norm();
            worst_disk = worst_disk.max(err);
            t.push(vec![
                "disk exact pair".into(),
                j.to_string(),
                tri.simplices().len().to_string(),
                num(s.re),
                num(bs.re),
                num(circulation),
                num(err),
                num(lhs.norm()),
                num(rhs.re),
            ]);
        }
        let spread = hi - lo;
        let mut out = Outcome { tables: vec![t], ..Default::default() };
        out.tolerance("spread_tolerance", self.spread_tolerance);
        out.tolerance("circulation_tolerance", self.circulation_tolerance);
        out.metric("increment_spread", spread);
        out.metric("increment_max_error", worst_exact);
        out.metric("disk_max_error", worst_disk);
        out.passed = spread <= self.spread_tolerance
            && worst_exact <= self.spread_tolerance
            && worst_disk <= self.circulation_tolerance;
        Ok(out)
    }
}
