use serde::{Deserialize, Serialize};

use crate::error::{Result, StochasticError};

/// Registered one-variable integrands with closed-form derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SmoothFn {
    /// `Σ c_k x^k`, degree at most 4.
    Polynomial { coefficients: Vec<f64> },
    /// `a·sin(kx)`.
    Sin { amplitude: f64, frequency: f64 },
    /// `a·cos(kx)`.
    Cos { amplitude: f64, frequency: f64 },
    /// `a·exp(−x²)`.
    Gaussian { amplitude: f64 },
}

impl SmoothFn {
    pub fn zero() -> Self {
        Self::Polynomial { coefficients: vec![] }
    }

    pub fn constant(c: f64) -> Self {
        Self::Polynomial { coefficients: vec![c] }
    }

    pub fn identity() -> Self {
        Self::Polynomial { coefficients: vec![0.0, 1.0] }
    }

    pub fn square() -> Self {
        Self::Polynomial { coefficients: vec![0.0, 0.0, 1.0] }
    }

    pub fn validate(&self) -> Result<()> {
        let finite =
            |x: f64| if x.is_finite() { Ok(()) } else { Err(StochasticError::NonFinite("function parameter")) };
        match self {
            Self::Polynomial { coefficients } => {
                if coefficients.len() > 5 {
                    return Err(StochasticError::Degree(coefficients.len() - 1));
                }
                coefficients.iter().try_for_each(|&c| finite(c))
            }
            Self::Sin { amplitude, frequency } | Self::Cos { amplitude, frequency } => {
                finite(*amplitude)?;
                finite(*frequency)
            }
            Self::Gaussian { amplitude } => finite(*amplitude),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Self::Polynomial { coefficients } => coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c),
            Self::Sin { amplitude, frequency } => amplitude * (frequency * x).sin(),
            Self::Cos { amplitude, frequency } => amplitude * (frequency * x).cos(),
            Self::Gaussian { amplitude } => amplitude * (-x * x).exp(),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            Self::Polynomial { coefficients } => {
                coefficients.iter().enumerate().skip(1).rev().fold(0.0, |acc, (k, &c)| acc * x + k as f64 * c)
            }
            Self::Sin { amplitude, frequency } => amplitude * frequency * (frequency * x).cos(),
            Self::Cos { amplitude, frequency } => -amplitude * frequency * (frequency * x).sin(),
            Self::Gaussian { amplitude } => -2.0 * x * amplitude * (-x * x).exp(),
        }
    }

    /// True when the function is identically constant.
    pub fn is_constant(&self) -> bool {
        match self {
            Self::Polynomial { coefficients } => coefficients.iter().skip(1).all(|&c| c == 0.0),
            Self::Sin { amplitude, frequency } | Self::Cos { amplitude, frequency } => {
                *amplitude == 0.0 || *frequency == 0.0
            }
            Self::Gaussian { amplitude } => *amplitude == 0.0,
        }
    }
}
