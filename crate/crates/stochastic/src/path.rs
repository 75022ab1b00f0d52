use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, StochasticError};

/// Brownian path on the uniform partition of `[0, 1]`.
///
/// Path `index` of a run with `seed` draws its increments from
/// `ChaCha8Rng::seed_from_u64(seed)` switched to stream `index`, so every
/// path is reproducible on its own and independent of thread scheduling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WienerPath {
    pub seed: u64,
    pub index: u64,
    pub samples: Vec<f64>,
}

impl WienerPath {
    pub fn n_steps(&self) -> usize {
        self.samples.len() - 1
    }

    /// Every `n_steps / n`-th sample; `n` must divide `n_steps`.
    pub fn coarsen(&self, n: usize) -> Result<Vec<f64>> {
        let m = self.n_steps();
        if n == 0 || !m.is_multiple_of(n) {
            return Err(StochasticError::IncompatibleSteps { n, max: m });
        }
        Ok(self.samples.iter().step_by(m / n).copied().collect())
    }
}

pub fn sample_path(n_steps: usize, seed: u64, index: u64) -> Result<WienerPath> {
    if n_steps < 2 {
        return Err(StochasticError::TooFewSteps(n_steps));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let sd = (1.0 / n_steps as f64).sqrt();
    let mut samples = Vec::with_capacity(n_steps + 1);
    let mut x = 0.0;
    samples.push(x);
    for _ in 0..n_steps {
        let z: f64 = StandardNormal.sample(&mut rng);
        x += sd * z;
        samples.push(x);
    }
    Ok(WienerPath { seed, index, samples })
}

pub fn sample_paths(n_steps: usize, n_paths: usize, seed: u64) -> Result<Vec<WienerPath>> {
    if n_steps < 2 {
        return Err(StochasticError::TooFewSteps(n_steps));
    }
    (0..n_paths as u64).into_par_iter().map(|i| sample_path(n_steps, seed, i)).collect()
}

/// `x(t) = a·sin(2πkt)` sampled at `n_steps + 1` uniform times.
pub fn smooth_path(n_steps: usize, amplitude: f64, frequency: f64) -> Result<Vec<f64>> {
    if n_steps < 2 {
        return Err(StochasticError::TooFewSteps(n_steps));
    }
    let w = 2.0 * std::f64::consts::PI * frequency;
    Ok((0..=n_steps).map(|i| amplitude * (w * i as f64 / n_steps as f64).sin()).collect())
}
