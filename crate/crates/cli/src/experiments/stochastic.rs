use pathquant_stochastic::{
    correction_experiment, quadratic_variation, second_order_welldefined, smooth_path_null, SmoothFn, TableRow,
};
use serde::{Deserialize, Serialize};

use super::{check, num, positive, Outcome, RunResult, Spec, Table};

const TABLE_HEADER: &[&str] = &["n_steps", "estimate", "l2_error", "stderr", "estimate_stderr", "n_paths", "seed"];

fn table(name: &'static str, rows: &[TableRow]) -> Table {
    let mut t = Table::new(name, TABLE_HEADER);
    for r in rows {
        t.push(vec![
            r.n_steps.to_string(),
            num(r.estimate),
            num(r.l2_error),
            num(r.stderr),
            num(r.estimate_stderr),
            r.n_paths.to_string(),
            r.seed.to_string(),
        ]);
    }
    t
}

/// Largest excess of `l2_error[k+1]` over `l2_error[k]`, in units of the
/// combined standard error; non-positive means strictly monotone.
fn monotone_excess(rows: &[TableRow]) -> f64 {
    rows.windows(2)
        .map(|w| (w[1].l2_error - w[0].l2_error) / w[0].stderr.hypot(w[1].stderr).max(f64::MIN_POSITIVE))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Largest `|estimate − target|` in standard errors.
fn mean_deviation(rows: &[TableRow], target: f64) -> f64 {
    rows.iter().map(|r| (r.estimate - target).abs() / r.estimate_stderr.max(f64::MIN_POSITIVE)).fold(0.0, f64::max)
}

fn powers(lo: u32, hi: u32) -> Vec<usize> {
    (lo..=hi).map(|e| 1usize << e).collect()
}

fn check_exponents(lo: u32, hi: u32) -> Result<(), String> {
    check(1 <= lo && lo <= hi && hi <= 16, || format!("need 1 <= min_exponent <= max_exponent <= 16, got {lo}..{hi}"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ItoStratonovich {
    pub function: SmoothFn,
    pub n_paths: usize,
    pub min_exponent: u32,
    pub max_exponent: u32,
    /// Expected mean of midpoint minus left-point; ½ for `f(x) = x`.
    pub expected_mean: f64,
    pub mean_allowance_se: f64,
    pub monotone_allowance_sigma: f64,
}

impl Default for ItoStratonovich {
    fn default() -> Self {
        Self {
            function: SmoothFn::identity(),
            n_paths: 10_000,
            min_exponent: 4,
            max_exponent: 12,
            expected_mean: 0.5,
            mean_allowance_se: 3.0,
            monotone_allowance_sigma: 2.0,
        }
    }
}

impl Spec for ItoStratonovich {
    fn validate(&self) -> Result<(), String> {
        self.function.validate().map_err(|e| e.to_string())?;
        check(self.n_paths >= 2, || "n_paths must be at least 2".into())?;
        check_exponents(self.min_exponent, self.max_exponent)?;
        check(self.expected_mean.is_finite(), || "expected_mean must be finite".into())?;
        positive("mean_allowance_se", self.mean_allowance_se)?;
        positive("monotone_allowance_sigma", self.monotone_allowance_sigma)
    }

    fn run(&self, seed: u64) -> RunResult {
        let steps = powers(self.min_exponent, self.max_exponent);
        let rows = correction_experiment(&self.function, &steps, self.n_paths, seed)?;
        let dev = mean_deviation(&rows, self.expected_mean);
        let excess = monotone_excess(&rows);
        let mut out = Outcome { tables: vec![table("correction", &rows)], ..Default::default() };
        out.tolerance("mean_allowance_se", self.mean_allowance_se);
        out.tolerance("monotone_allowance_sigma", self.monotone_allowance_sigma);
        out.metric("max_mean_deviation_se", dev);
        out.metric("max_monotone_excess_sigma", excess);
        out.passed = dev <= self.mean_allowance_se && excess <= self.monotone_allowance_sigma;
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SinePath {
    pub amplitude: f64,
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoothPathNull {
    pub function: SmoothFn,
    pub n_steps: usize,
    /// Paths `x(t) = a·sin(2πkt)`.
    pub paths: Vec<SinePath>,
    pub tolerance: f64,
}

impl Default for SmoothPathNull {
    fn default() -> Self {
        Self {
            function: SmoothFn::identity(),
            n_steps: 4096,
            paths: vec![SinePath { amplitude: 1.0, frequency: 1.0 }, SinePath { amplitude: 0.25, frequency: 3.0 }],
            tolerance: 1e-6,
        }
    }
}

impl Spec for SmoothPathNull {
    fn validate(&self) -> Result<(), String> {
        self.function.validate().map_err(|e| e.to_string())?;
        check(self.n_steps >= 2, || "n_steps must be at least 2".into())?;
        check(!self.paths.is_empty(), || "paths must not be empty".into())?;
        for p in &self.paths {
            check(p.amplitude.is_finite() && p.frequency.is_finite(), || "path parameters must be finite".into())?;
        }
        positive("tolerance", self.tolerance)
    }

    fn run(&self, _seed: u64) -> RunResult {
        let mut t = Table::new(
            "null",
            &[
                "amplitude",
                "frequency",
                "n_steps",
                "left",
                "midpoint",
                "difference",
                "predicted_gap",
                "difference_doubled",
                "extrapolated",
            ],
        );
        let mut worst = 0.0f64;
        let mut worst_extrapolated = 0.0f64;
        for p in &self.paths {
            let r = smooth_path_null(&self.function, self.n_steps, p.amplitude, p.frequency)?;
            worst = worst.max(r.difference.abs());
            worst_extrapolated = worst_extrapolated.max(r.extrapolated.abs());
            t.push(vec![
                num(p.amplitude),
                num(p.frequency),
                r.n_steps.to_string(),
                num(r.left),
                num(r.midpoint),
                num(r.difference),
                num(r.predicted_gap),
                num(r.difference_doubled),
                num(r.extrapolated),
            ]);
        }
        let mut out = Outcome { tables: vec![t], ..Default::default() };
        out.tolerance("tolerance", self.tolerance);
        out.metric("max_abs_difference", worst);
        out.metric("max_abs_extrapolated", worst_extrapolated);
        out.passed = worst <= self.tolerance;
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SecondOrder {
    pub f: SmoothFn,
    pub g: SmoothFn,
    pub n_paths: usize,
    pub min_exponent: u32,
    pub max_exponent: u32,
    /// Bound on the final mean-square difference of the two forms.
    pub tolerance: f64,
    pub monotone_allowance_sigma: f64,
    pub qv_allowance_se: f64,
}

impl Default for SecondOrder {
    fn default() -> Self {
        Self {
            f: SmoothFn::Sin { amplitude: 1.0, frequency: 2.0 },
            g: SmoothFn::Gaussian { amplitude: 0.7 },
            n_paths: 1000,
            min_exponent: 3,
            max_exponent: 9,
            tolerance: 1e-5,
            monotone_allowance_sigma: 2.0,
            qv_allowance_se: 3.0,
        }
    }
}

impl Spec for SecondOrder {
    fn validate(&self) -> Result<(), String> {
        self.f.validate().map_err(|e| e.to_string())?;
        self.g.validate().map_err(|e| e.to_string())?;
        check(self.n_paths >= 2, || "n_paths must be at least 2".into())?;
        check_exponents(self.min_exponent, self.max_exponent)?;
        positive("tolerance", self.tolerance)?;
        positive("monotone_allowance_sigma", self.monotone_allowance_sigma)?;
        positive("qv_allowance_se", self.qv_allowance_se)
    }

    fn run(&self, seed: u64) -> RunResult {
        let steps = powers(self.min_exponent, self.max_exponent);
        let diff = second_order_welldefined(&self.f, &self.g, &steps, self.n_paths, seed)?;
        let qv = quadratic_variation(&steps, self.n_paths, seed)?;
        let final_l2 = diff.last().map_or(f64::NAN, |r| r.l2_error);
        let excess = monotone_excess(&diff).max(monotone_excess(&qv));
        let qv_dev = mean_deviation(&qv, 1.0);
        let mut out = Outcome {
            tables: vec![table("welldefined", &diff), table("quadratic_variation", &qv)],
            ..Default::default()
        };
        out.tolerance("tolerance", self.tolerance);
        out.tolerance("monotone_allowance_sigma", self.monotone_allowance_sigma);
        out.tolerance("qv_allowance_se", self.qv_allowance_se);
        out.metric("final_l2_difference", final_l2);
        out.metric("max_monotone_excess_sigma", excess);
        out.metric("max_qv_deviation_se", qv_dev);
        out.passed =
            final_l2 <= self.tolerance && excess <= self.monotone_allowance_sigma && qv_dev <= self.qv_allowance_se;
        Ok(out)
    }
}
