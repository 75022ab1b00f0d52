use serde::{Deserialize, Serialize};

use crate::family::SmoothFn;

/// Two-point integrands `F(x, y)` built from registered functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Prescription {
    /// `f(x)(y − x)`
    LeftPoint { f: SmoothFn },
    /// `f((x + y)/2)(y − x)`
    Midpoint { f: SmoothFn },
    /// `f(x)(y − x) + g(x)(y − x)²`
    SecondOrder { f: SmoothFn, g: SmoothFn },
    /// `f(m)(y − x) + (g(m) − ½f′(m))(y − x)²` with `m = (x + y)/2`; same
    /// first and second `y`-derivatives at `y = x` as `SecondOrder`.
    MidpointSecondOrder { f: SmoothFn, g: SmoothFn },
    /// `G(y) − G(x)`
    Increment { g: SmoothFn },
}

impl Prescription {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let d = y - x;
        let m = 0.5 * (x + y);
        match self {
            Self::LeftPoint { f } => f.value(x) * d,
            Self::Midpoint { f } => f.value(m) * d,
            Self::SecondOrder { f, g } => f.value(x) * d + g.value(x) * d * d,
            Self::MidpointSecondOrder { f, g } => f.value(m) * d + (g.value(m) - 0.5 * f.derivative(m)) * d * d,
            Self::Increment { g } => g.value(y) - g.value(x),
        }
    }
}

/// `Σ F(x_i, x_{i+1})` over consecutive samples.
pub fn prescription_sum(samples: &[f64], f: &Prescription) -> f64 {
    samples.windows(2).map(|w| f.eval(w[0], w[1])).sum()
}
