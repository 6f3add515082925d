//! Registered regression functions and design densities with analytic
//! derivatives.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TrueFunction {
    #[default]
    Sin2Pi,
    Linear,
    Square,
    Constant,
}

impl TrueFunction {
    pub fn name(self) -> &'static str {
        match self {
            TrueFunction::Sin2Pi => "sin2pi",
            TrueFunction::Linear => "linear",
            TrueFunction::Square => "square",
            TrueFunction::Constant => "constant",
        }
    }

    pub fn value(self, x: f64) -> f64 {
        match self {
            TrueFunction::Sin2Pi => (TAU * x).sin(),
            TrueFunction::Linear => x,
            TrueFunction::Square => x * x,
            TrueFunction::Constant => 1.0,
        }
    }

    pub fn d1(self, x: f64) -> f64 {
        match self {
            TrueFunction::Sin2Pi => TAU * (TAU * x).cos(),
            TrueFunction::Linear => 1.0,
            TrueFunction::Square => 2.0 * x,
            TrueFunction::Constant => 0.0,
        }
    }

    pub fn d2(self, x: f64) -> f64 {
        match self {
            TrueFunction::Sin2Pi => -TAU * TAU * (TAU * x).sin(),
            TrueFunction::Linear => 0.0,
            TrueFunction::Square => 2.0,
            TrueFunction::Constant => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DesignDensity {
    #[default]
    StandardNormal,
    /// Uniform on `[0, 1]`.
    Uniform,
}

impl DesignDensity {
    pub fn pdf(self, x: f64) -> f64 {
        match self {
            DesignDensity::StandardNormal => (-0.5 * x * x).exp() / (TAU).sqrt(),
            DesignDensity::Uniform => {
                if (0.0..=1.0).contains(&x) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn d1(self, x: f64) -> f64 {
        match self {
            DesignDensity::StandardNormal => -x * self.pdf(x),
            DesignDensity::Uniform => 0.0,
        }
    }

    pub fn d2(self, x: f64) -> f64 {
        match self {
            DesignDensity::StandardNormal => (x * x - 1.0) * self.pdf(x),
            DesignDensity::Uniform => 0.0,
        }
    }

    pub fn quantile(self, p: f64) -> f64 {
        match self {
            DesignDensity::StandardNormal => {
                use statrs::distribution::{ContinuousCDF, Normal};
                Normal::new(0.0, 1.0).expect("unit normal").inverse_cdf(p)
            }
            DesignDensity::Uniform => p,
        }
    }

    /// Central range holding a fraction `mass` of the design.
    pub fn central_range(self, mass: f64) -> (f64, f64) {
        let tail = (1.0 - mass) / 2.0;
        (self.quantile(tail), self.quantile(1.0 - tail))
    }
}

/// `int m(x) f(x) dx` for the registered pairs, in closed form.
pub fn mean_response(m: TrueFunction, f: DesignDensity) -> f64 {
    match (m, f) {
        (TrueFunction::Constant, _) => 1.0,
        (TrueFunction::Linear, DesignDensity::StandardNormal) => 0.0,
        (TrueFunction::Linear, DesignDensity::Uniform) => 0.5,
        (TrueFunction::Square, DesignDensity::StandardNormal) => 1.0,
        (TrueFunction::Square, DesignDensity::Uniform) => 1.0 / 3.0,
        (TrueFunction::Sin2Pi, _) => 0.0,
    }
}

/// `E[m(X)^2]` for the registered pairs.
pub fn mean_square_response(m: TrueFunction, f: DesignDensity) -> f64 {
    match (m, f) {
        (TrueFunction::Constant, _) => 1.0,
        (TrueFunction::Linear, DesignDensity::StandardNormal) => 1.0,
        (TrueFunction::Linear, DesignDensity::Uniform) => 1.0 / 3.0,
        (TrueFunction::Square, DesignDensity::StandardNormal) => 3.0,
        (TrueFunction::Square, DesignDensity::Uniform) => 0.2,
        (TrueFunction::Sin2Pi, DesignDensity::Uniform) => 0.5,
        (TrueFunction::Sin2Pi, DesignDensity::StandardNormal) => 0.5 * (1.0 - (-4.0 * TAU * PI).exp()),
    }
}
