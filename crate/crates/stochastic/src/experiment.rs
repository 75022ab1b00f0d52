use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, StochasticError};
use crate::family::SmoothFn;
use crate::path::{sample_path, smooth_path, WienerPath};
use crate::prescription::{prescription_sum, Prescription};

/// One line of a Monte Carlo table. `estimate` is the mean of the
/// per-path statistic, `l2_error` the mean of its squared error, and
/// `stderr` the standard error of `l2_error`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableRow {
    pub n_steps: usize,
    pub estimate: f64,
    pub estimate_stderr: f64,
    pub l2_error: f64,
    pub stderr: f64,
    pub n_paths: usize,
    pub seed: u64,
}

pub type CorrectionRow = TableRow;
pub type DifferenceRow = TableRow;

fn validate(steps: &[usize], n_paths: usize) -> Result<usize> {
    let max = *steps.iter().max().ok_or(StochasticError::EmptySteps)?;
    if n_paths < 2 {
        return Err(StochasticError::TooFewPaths(n_paths));
    }
    for &n in steps {
        if n < 2 {
            return Err(StochasticError::TooFewSteps(n));
        }
        if !max.is_multiple_of(n) {
            return Err(StochasticError::IncompatibleSteps { n, max });
        }
    }
    Ok(max)
}

fn mean_stderr(xs: impl Iterator<Item = f64> + Clone, count: usize) -> (f64, f64) {
    let n = count as f64;
    let mean = xs.clone().sum::<f64>() / n;
    let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs `stat(path, n) -> (value, error)` on one fine path per index,
/// coarsened to every `n` in `steps`. Per-path results are reduced in index
/// order so tables do not depend on the thread count.
fn table(
    steps: &[usize],
    n_paths: usize,
    seed: u64,
    refine: usize,
    stat: impl Fn(&WienerPath, usize) -> Result<(f64, f64)> + Sync,
) -> Result<Vec<TableRow>> {
    let max = validate(steps, n_paths)?;
    let per_path: Vec<Vec<(f64, f64)>> = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let path = sample_path(max * refine, seed, i)?;
            steps.iter().map(|&n| stat(&path, n)).collect()
        })
        .collect::<Result<_>>()?;
    Ok(steps
        .iter()
        .enumerate()
        .map(|(k, &n_steps)| {
            let (estimate, estimate_stderr) = mean_stderr(per_path.iter().map(|r| r[k].0), n_paths);
            let (l2_error, stderr) = mean_stderr(per_path.iter().map(|r| r[k].1 * r[k].1), n_paths);
            TableRow { n_steps, estimate, estimate_stderr, l2_error, stderr, n_paths, seed }
        })
        .collect())
}

/// `D_n = Σ midpoint − Σ left-point` against `R = ½∫ f′(x(t)) dt`, where `R`
/// is the trapezoid rule on the same path refined eightfold.
pub fn correction_experiment(f: &SmoothFn, steps: &[usize], n_paths: usize, seed: u64) -> Result<Vec<CorrectionRow>> {
    f.validate()?;
    let left = Prescription::LeftPoint { f: f.clone() };
    let mid = Prescription::Midpoint { f: f.clone() };
    table(steps, n_paths, seed, 8, |path, n| {
        let xs = path.coarsen(n)?;
        let d = prescription_sum(&xs, &mid) - prescription_sum(&xs, &left);
        let fine = path.coarsen(8 * n)?;
        let h = 1.0 / (8 * n) as f64;
        let r = 0.5 * h * fine.windows(2).map(|w| 0.5 * (f.derivative(w[0]) + f.derivative(w[1]))).sum::<f64>();
        Ok((d, d - r))
    })
}

/// `Σ F_left − Σ F_mid` for the second-order pair `(f, g)` written once
/// with left-point and once with midpoint evaluation.
pub fn second_order_welldefined(
    f: &SmoothFn,
    g: &SmoothFn,
    steps: &[usize],
    n_paths: usize,
    seed: u64,
) -> Result<Vec<DifferenceRow>> {
    f.validate()?;
    g.validate()?;
    let a = Prescription::SecondOrder { f: f.clone(), g: g.clone() };
    let b = Prescription::MidpointSecondOrder { f: f.clone(), g: g.clone() };
    table(steps, n_paths, seed, 1, |path, n| {
        let xs = path.coarsen(n)?;
        let d = prescription_sum(&xs, &a) - prescription_sum(&xs, &b);
        Ok((d, d))
    })
}

/// `Σ (Δx)²` and its deviation from 1.
pub fn quadratic_variation(steps: &[usize], n_paths: usize, seed: u64) -> Result<Vec<TableRow>> {
    let qv = Prescription::SecondOrder { f: SmoothFn::zero(), g: SmoothFn::constant(1.0) };
    table(steps, n_paths, seed, 1, |path, n| {
        let s = prescription_sum(&path.coarsen(n)?, &qv);
        Ok((s, s - 1.0))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothNullReport {
    pub n_steps: usize,
    pub left: f64,
    pub midpoint: f64,
    /// `Σ midpoint − Σ left-point`.
    pub difference: f64,
    /// `(1/2n) ∫ f′(x(t)) x′(t)² dt`, the leading term of `difference`.
    pub predicted_gap: f64,
    /// Same difference at `2n` steps.
    pub difference_doubled: f64,
    /// `2·difference_doubled − difference`.
    pub extrapolated: f64,
}

/// Left-point and midpoint sums along `x(t) = a·sin(2πkt)`.
pub fn smooth_path_null(f: &SmoothFn, n_steps: usize, amplitude: f64, frequency: f64) -> Result<SmoothNullReport> {
    f.validate()?;
    let left = Prescription::LeftPoint { f: f.clone() };
    let mid = Prescription::Midpoint { f: f.clone() };
    let diff = |n: usize| -> Result<(f64, f64, f64)> {
        let xs = smooth_path(n, amplitude, frequency)?;
        let (l, m) = (prescription_sum(&xs, &left), prescription_sum(&xs, &mid));
        Ok((l, m, m - l))
    };
    let (l, m, d) = diff(n_steps)?;
    let (_, _, d2) = diff(2 * n_steps)?;
    let w = 2.0 * std::f64::consts::PI * frequency;
    let q = 64 * n_steps;
    let integrand = |t: f64| {
        let v = amplitude * w * (w * t).cos();
        f.derivative(amplitude * (w * t).sin()) * v * v
    };
    // composite Simpson
    let h = 1.0 / q as f64;
    let simpson = (0..=q)
        .map(|i| {
            let c = if i == 0 || i == q {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * integrand(i as f64 * h)
        })
        .sum::<f64>()
        * h
        / 3.0;
    Ok(SmoothNullReport {
        n_steps,
        left: l,
        midpoint: m,
        difference: d,
        predicted_gap: simpson / (2.0 * n_steps as f64),
        difference_doubled: d2,
        extrapolated: 2.0 * d2 - d,
    })
}
