//! Errors that are centered nonlinear transforms of a linear LRD process.

use serde::{Deserialize, Serialize};

use super::coefficients::CoefficientSequence;
use super::linear::{check_lengths, decompose_aligned, LinearDecomposition};
use crate::error::{config, Error, Result};
use crate::innovations::{draw_aligned, draw_innovations, InnovationLaw, InnovationSpec};
use crate::scalar::Scalar;

/// Number of draws in the Monte Carlo pre-run that centers `|L|^delta`.
pub const CENTERING_DRAWS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Transform {
    /// `L^2 - E[L^2]`.
    Square,
    /// `|L|^delta - E|L|^delta`; `centering` holds the pre-run mean once computed.
    AbsPower { delta: f64, centering: Option<f64> },
}

impl Transform {
    pub fn abs_power(delta: f64) -> Self {
        Transform::AbsPower { delta, centering: None }
    }

    pub fn validate(&self, law: InnovationLaw) -> Result<()> {
        match *self {
            Transform::Square => Ok(()),
            Transform::AbsPower { delta, .. } => {
                if !(delta > 0.0 && delta.is_finite()) {
                    return Err(config("abs-power exponent must be positive"));
                }
                if law != InnovationLaw::StandardGaussian {
                    return Err(config(
                        "abs-power transform needs Gaussian innovations for its centering pre-run",
                    ));
                }
                Ok(())
            }
        }
    }

    /// Fills in the abs-power centering constant by simulation if missing.
    pub fn centered<T: Scalar>(self, coeffs: &CoefficientSequence<T>, seed: u64) -> Result<Self> {
        match self {
            Transform::AbsPower { delta, centering: None } => {
                let s = coeffs.square_sum().as_f64().sqrt();
                let draws = draw_innovations::<f64>(&InnovationSpec::gaussian(seed), CENTERING_DRAWS)?;
                let mean = draws.iter().map(|z| (s * z).abs().powf(delta)).sum::<f64>()
                    / CENTERING_DRAWS as f64;
                Ok(Transform::AbsPower { delta, centering: Some(mean) })
            }
            other => Ok(other),
        }
    }
}

/// Closed form of `E|N(0, s^2)|^delta`.
pub fn gaussian_abs_moment(s: f64, delta: f64) -> f64 {
    use statrs::function::gamma::gamma;
    s.powf(delta) * 2f64.powf(delta / 2.0) * gamma((delta + 1.0) / 2.0) / std::f64::consts::PI.sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalPath<T> {
    pub eps: Vec<T>,
    /// `E[eps_i | past]`, available for the square transform only.
    pub cond_mean: Option<Vec<T>>,
    pub linear: LinearDecomposition<T>,
}

/// Applies a centered transform to a linear process driven by `innovations`.
///
/// For the square transform with unit-variance innovations,
/// `eps_i = c_0^2 (eta_i^2 - 1) + 2 c_0 eta_i p_i + (c_0^2 + p_i^2 - sum c_k^2)`
/// where `p_i` is the predictable part; the last bracket is the conditional mean.
pub fn simulate_functional_of_linear<T: Scalar>(
    coeffs: &CoefficientSequence<T>,
    transform: Transform,
    innovations: &InnovationSpec,
    n: usize,
    burn_in: usize,
) -> Result<FunctionalPath<T>> {
    transform.validate(innovations.law)?;
    let k = coeffs.truncation();
    check_lengths(n, k, burn_in)?;
    let eta = draw_aligned::<T>(innovations, n, k)?;
    let linear = decompose_aligned(coeffs, &eta, n);
    match transform {
        Transform::Square => {
            let total = coeffs.square_sum();
            let c0sq = coeffs.leading() * coeffs.leading();
            let eps = linear.eps.iter().map(|&l| l * l - total).collect();
            let cond = linear.eps_pred.iter().map(|&p| c0sq + p * p - total).collect();
            Ok(FunctionalPath { eps, cond_mean: Some(cond), linear })
        }
        Transform::AbsPower { delta, centering } => {
            let c = centering.ok_or_else(|| {
                Error::Config("abs-power transform used before its centering pre-run".into())
            })?;
            let (d, c) = (T::lit(delta), T::lit(c));
            let eps = linear.eps.iter().map(|&l| l.abs().powf(d) - c).collect();
            Ok(FunctionalPath { eps, cond_mean: None, linear })
        }
    }
}
