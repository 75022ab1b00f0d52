//! Experiment registry. Each experiment is a parameter struct with pinned
//! default tolerances; running it yields CSV tables, metrics and a verdict.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

mod quantum;
mod simplicial;
mod stochastic;

pub use quantum::{
    BksPairing, CommutatorStar, InnerProductLemma, KsAgreement, NegativeNorm, SimpVsFull, WeylAgreement,
};
pub use simplicial::{RiemannConvergence, StokesPair};
pub use stochastic::{ItoStratonovich, SecondOrder, SmoothPathNull};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &'static str, header: &[&'static str]) -> Self {
        Self { name, header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip form.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub tolerances: BTreeMap<&'static str, f64>,
    pub metrics: BTreeMap<String, f64>,
    pub passed: bool,
}

impl Outcome {
    fn tolerance(&mut self, key: &'static str, v: f64) {
        self.tolerances.insert(key, v);
    }

    fn metric(&mut self, key: impl Into<String>, v: f64) {
        self.metrics.insert(key.into(), v);
    }
}

/// Failure inside the numerics (resolution, decay, convergence). Recorded
/// as a failed experiment rather than a validation error.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure(pub String);

impl<E: std::fmt::Display> From<E> for RunFailure {
    fn from(e: E) -> Self {
        Self(e.to_string())
    }
}

pub type RunResult = Result<Outcome, RunFailure>;

trait Spec {
    fn validate(&self) -> Result<(), String>;
    fn run(&self, seed: u64) -> RunResult;
}

macro_rules! registry {
    ($($variant:ident => $name:literal, $desc:literal;)*) => {
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(tag = "name", rename_all = "kebab-case")]
        pub enum Experiment {
            $($variant($variant),)*
        }

        /// `(name, description)` for every registered experiment.
        pub const REGISTRY: &[(&str, &str)] = &[$(($name, $desc),)*];

        impl Experiment {
            pub fn name(&self) -> &'static str {
                match self {
                    $(Self::$variant(_) => $name,)*
                }
            }

            pub fn validate(&self) -> Result<(), String> {
                match self {
                    $(Self::$variant(e) => e.validate(),)*
                }
            }

            pub fn run(&self, seed: u64) -> RunResult {
                match self {
                    $(Self::$variant(e) => e.run(seed),)*
                }
            }

            /// Every experiment with default parameters, in registry order.
            pub fn defaults() -> Vec<Experiment> {
                vec![$(Self::$variant($variant::default()),)*]
            }
        }
    };
}

registry! {
    NegativeNorm => "negative-norm", "most negative eigenvalue of the discretized path-integral form and a decaying witness section";
    InnerProductLemma => "inner-product-lemma", "path-integral vs L2 inner product on Hermite pairs of one polarization, with a calibrated constant";
    WeylAgreement => "weyl-agreement", "quantization map vs Weyl operators on vertical-family polarized states";
    KsAgreement => "ks-agreement", "quantization map vs Kostant-Souriau prequantization for 1, q, p, pq";
    CommutatorStar => "commutator-star", "canonical commutator, star commutator and operator composition vs star product";
    SimpVsFull => "simp-vs-full", "polarized reduction of the quantization map vs the full form on random polarized states";
    RiemannConvergence => "riemann-convergence", "Riemann sums of diagonal cochains under barycentric subdivision";
    StokesPair => "stokes-pair", "closed cochain pairs: interval increments and the exact disk pair";
    ItoStratonovich => "ito-stratonovich", "midpoint minus left-point sums along Wiener paths vs half the integral of f'";
    SmoothPathNull => "smooth-path-null", "left-point vs midpoint sums along smooth sampled paths";
    SecondOrder => "second-order", "left-point and midpoint second-order prescriptions agree; quadratic variation tends to 1";
    BksPairing => "bks-pairing", "pairing between Kahler and squeezed polarized bases is a scaled unitary";
}

pub(crate) fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub(crate) fn positive(name: &str, v: f64) -> Result<(), String> {
    check(v.is_finite() && v > 0.0, || format!("{name} must be positive and finite, got {v}"))
}
