use serde::{Deserialize, Serialize};

use super::coefficients::{power_law_coeffs, CoefficientSequence};
use super::linear::simulate_linear;
use crate::error::{config, Result};
use crate::innovations::{draw_innovations, InnovationLaw, InnovationSpec};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PredictorMode {
    #[default]
    IidGaussian,
    /// Gaussian linear design `X_i = sum_k a_k zeta_{i-k}`; `alpha_x = 1`
    /// collapses to the i.i.d. case.
    LrdGaussian,
}

/// Random design. In LRD mode the weights are `a_0 = 1`,
/// `a_k = a0_scale * k^{-(alpha_x+1)/2}`, rescaled to a unit marginal variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictorSpec {
    #[serde(default)]
    pub mode: PredictorMode,
    #[serde(default = "default_alpha_x")]
    pub alpha_x: f64,
    #[serde(default = "default_scale")]
    pub a0_scale: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_truncation")]
    pub truncation: usize,
}

fn default_alpha_x() -> f64 {
    1.0
}
fn default_scale() -> f64 {
    1.0
}
fn default_truncation() -> usize {
    5000
}

impl PredictorSpec {
    pub fn iid(seed: u64) -> Self {
        Self { mode: PredictorMode::IidGaussian, alpha_x: 1.0, a0_scale: 1.0, seed, truncation: default_truncation() }
    }

    pub fn lrd(alpha_x: f64, seed: u64) -> Self {
        Self { mode: PredictorMode::LrdGaussian, alpha_x, ..Self::iid(seed) }
    }

    pub fn with_truncation(mut self, k: usize) -> Self {
        self.truncation = k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode == PredictorMode::LrdGaussian {
            if !(self.alpha_x > 0.0 && self.alpha_x <= 1.0) {
                return Err(config(format!("predictor memory exponent {} outside (0, 1]", self.alpha_x)));
            }
            if !(self.a0_scale > 0.0 && self.a0_scale.is_finite()) {
                return Err(config("predictor weight scale must be positive"));
            }
            if self.truncation < 2 {
                return Err(config("predictor truncation must be at least 2"));
            }
        }
        Ok(())
    }

    /// Effective memory exponent; `1` for independent designs.
    pub fn memory(&self) -> f64 {
        match self.mode {
            PredictorMode::IidGaussian => 1.0,
            PredictorMode::LrdGaussian => self.alpha_x,
        }
    }

    fn is_iid(&self) -> bool {
        self.memory() == 1.0
    }

    pub fn coefficients<T: Scalar>(&self) -> Result<CoefficientSequence<T>> {
        self.validate()?;
        match self.is_iid() {
            true => Ok(CoefficientSequence::iid()),
            false => Ok(power_law_coeffs(T::lit(self.alpha_x), self.truncation, T::lit(self.a0_scale))?
                .normalized()),
        }
    }

    fn innovations(&self) -> InnovationSpec {
        InnovationSpec { law: InnovationLaw::StandardGaussian, seed: self.seed }
    }
}

/// Draws `n` design points with a standard normal marginal.
pub fn simulate_predictors<T: Scalar>(spec: &PredictorSpec, n: usize) -> Result<Vec<T>> {
    spec.validate()?;
    match spec.is_iid() {
        true => draw_innovations(&spec.innovations(), n),
        false => {
            let c = spec.coefficients::<T>()?;
            simulate_linear(&c, &spec.innovations(), n, c.truncation())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iid_design_is_standard_normal() {
        let x = simulate_predictors::<f64>(&PredictorSpec::iid(3), 50_000).unwrap();
        let m = x.iter().sum::<f64>() / 5e4;
        let v = x.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / 5e4;
        assert!(m.abs() < 0.03 && (v - 1.0).abs() < 0.03);
    }

    #[test]
    fn lrd_design_has_unit_variance_weights() {
        let s = PredictorSpec::lrd(0.4, 1).with_truncation(1000);
        let c = s.coefficients::<f64>().unwrap();
        assert!((c.square_sum() - 1.0).abs() < 1e-12);
        assert!(PredictorSpec::lrd(1.2, 1).validate().is_err());
    }

    #[test]
    fn unit_memory_design_equals_iid() {
        let a = simulate_predictors::<f64>(&PredictorSpec::lrd(1.0, 4), 100).unwrap();
        let b = simulate_predictors::<f64>(&PredictorSpec::iid(4), 100).unwrap();
        assert_eq!(a, b);
    }
}
