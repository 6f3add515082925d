//! Error processes for the regression model, dispatched through [`ProcessSpec`].

pub mod coefficients;
pub mod functional;
pub mod linear;
pub mod predictors;
pub mod volatility;

use serde::{Deserialize, Serialize};

pub use coefficients::{
    farima_coeffs, linear_lrd_coeffs, partial_sum_variance_oracle, power_law_coeffs, CoefficientSequence,
};
pub use functional::{simulate_functional_of_linear, FunctionalPath, Transform};
pub use linear::{conditional_mean_decomposition, simulate_linear, LinearDecomposition};
pub use predictors::{simulate_predictors, PredictorMode, PredictorSpec};
pub use volatility::{simulate_farima_garch, GarchParams, VolatilityPath};

use crate::error::{config, Error, Result};
use crate::innovations::{split_seed, InnovationSpec};
use crate::scalar::Scalar;

/// Default number of MA lags when none is configured: `max(5000, n)`.
pub const DEFAULT_TRUNCATION: usize = 5000;

const CENTERING_SEED: u64 = 0xCE47_E21A;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinearBase {
    LinearLrd,
    Farima,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Family {
    Iid,
    /// Pure power-law weights `k^{-(alpha+1)/2}`.
    LinearLrd,
    /// FARIMA(0, d, 0).
    Farima,
    FunctionalOfLinear { base: LinearBase, transform: Transform },
    FarimaGarch { garch: GarchParams },
    StochasticVolatility { level: f64 },
    Larch { level: f64, energy: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Iid => "iid",
            Family::LinearLrd => "linear-lrd",
            Family::Farima => "farima",
            Family::FunctionalOfLinear { .. } => "functional-of-linear",
            Family::FarimaGarch { .. } => "farima-garch",
            Family::StochasticVolatility { .. } => "stochastic-volatility",
            Family::Larch { .. } => "larch",
        }
    }
}

/// How linear-filter weights are scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorScale {
    /// `sum c_k^2 = 1`, so the errors have unit marginal variance.
    #[default]
    UnitVariance,
    /// `c_0 = 1`, unit innovation variance.
    UnitInnovation,
}

/// Full description of an error process. Memory is given through `d`,
/// with `alpha = 1 - 2d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    pub family: Family,
    #[serde(default)]
    pub d: f64,
    #[serde(default)]
    pub innovation: InnovationSpec,
    #[serde(default)]
    pub truncation: Option<usize>,
    #[serde(default)]
    pub burn_in: Option<usize>,
    #[serde(default)]
    pub scale: ErrorScale,
}

impl Default for InnovationSpec {
    fn default() -> Self {
        InnovationSpec::gaussian(0)
    }
}

/// Errors together with their conditional means given the past, when known.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalPath<T> {
    pub eps: Vec<T>,
    pub cond_mean: Option<Vec<T>>,
}

fn d_from_alpha(alpha: f64) -> f64 {
    (1.0 - alpha) / 2.0
}

impl ProcessSpec {
    fn with_family(family: Family, d: f64, innovation: InnovationSpec) -> Self {
        Self { family, d, innovation, truncation: None, burn_in: None, scale: ErrorScale::default() }
    }

    pub fn iid(innovation: InnovationSpec) -> Self {
        Self::with_family(Family::Iid, 0.0, innovation)
    }

    pub fn linear_lrd(alpha: f64, innovation: InnovationSpec) -> Self {
        Self::with_family(Family::LinearLrd, d_from_alpha(alpha), innovation)
    }

    pub fn farima(d: f64, innovation: InnovationSpec) -> Self {
        Self::with_family(Family::Farima, d, innovation)
    }

    pub fn functional(base: LinearBase, alpha: f64, transform: Transform, innovation: InnovationSpec) -> Self {
        Self::with_family(Family::FunctionalOfLinear { base, transform }, d_from_alpha(alpha), innovation)
    }

    pub fn farima_garch(d: f64, garch: GarchParams, innovation: InnovationSpec) -> Self {
        Self::with_family(Family::FarimaGarch { garch }, d, innovation)
    }

    pub fn stochastic_volatility(alpha: f64, level: f64, innovation: InnovationSpec) -> Self {
        Self::with_family(Family::StochasticVolatility { level }, d_from_alpha(alpha), innovation)
    }

    pub fn larch(alpha: f64, level: f64, energy: f64, innovation: InnovationSpec) -> Self {
        Self::with_family(Family::Larch { level, energy }, d_from_alpha(alpha), innovation)
    }

    pub fn with_truncation(mut self, k: usize) -> Self {
        self.truncation = Some(k);
        self
    }

    pub fn with_burn_in(mut self, b: usize) -> Self {
        self.burn_in = Some(b);
        self
    }

    pub fn with_scale(mut self, scale: ErrorScale) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.innovation.seed = seed;
        self
    }

    pub fn alpha(&self) -> f64 {
        1.0 - 2.0 * self.d
    }

    pub fn truncation_for(&self, n: usize) -> usize {
        self.truncation.unwrap_or(DEFAULT_TRUNCATION.max(n))
    }

    pub fn burn_in_for(&self, n: usize) -> usize {
        self.burn_in.unwrap_or_else(|| self.truncation_for(n))
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.d;
        if !d.is_finite() {
            return Err(config("memory parameter must be finite"));
        }
        let persistent = (0.0..0.5).contains(&d);
        match &self.family {
            Family::Iid => {}
            Family::Farima | Family::FarimaGarch { .. } => {
                if !(d.abs() < 0.5) {
                    return Err(config(format!("fractional parameter {d} outside (-1/2, 1/2)")));
                }
            }
            Family::LinearLrd | Family::FunctionalOfLinear { .. } => {
                if !persistent {
                    return Err(config(format!("memory exponent {} outside (0, 1]", self.alpha())));
                }
            }
            Family::StochasticVolatility { .. } | Family::Larch { .. } => {
                if !(d > 0.0 && d < 0.5) {
                    return Err(config(format!("memory exponent {} outside (0, 1)", self.alpha())));
                }
            }
        }
        match &self.family {
            Family::FunctionalOfLinear { transform, .. } => transform.validate(self.innovation.law)?,
            Family::FarimaGarch { garch } => garch.validate()?,
            Family::StochasticVolatility { level } if !(*level > 0.0) => {
                return Err(config("volatility level must be positive"));
            }
            Family::Larch { level, energy } => {
                if !(*level > 0.0) {
                    return Err(config("LARCH level must be positive"));
                }
                if !(*energy > 0.0) {
                    return Err(config("LARCH weight energy must be positive"));
                }
                if *energy >= 1.0 {
                    return Err(Error::Stationarity(format!("LARCH weight energy {energy} is not below one")));
                }
            }
            _ => {}
        }
        if let (Some(k), Some(b)) = (self.truncation, self.burn_in) {
            if b < k {
                return Err(config(format!("burn-in {b} is shorter than truncation {k}")));
            }
        }
        if self.truncation == Some(0) && !matches!(self.family, Family::Iid) {
            return Err(config("truncation must be at least one lag"));
        }
        Ok(())
    }

    fn scaled<T: Scalar>(&self, c: CoefficientSequence<T>) -> CoefficientSequence<T> {
        match self.scale {
            ErrorScale::UnitVariance => c.normalized(),
            ErrorScale::UnitInnovation => c,
        }
    }

    fn base_coefficients<T: Scalar>(&self, base: LinearBase, k: usize) -> Result<CoefficientSequence<T>> {
        let d = T::lit(self.d);
        let raw = match base {
            LinearBase::Farima => farima_coeffs(d, k)?,
            LinearBase::LinearLrd if self.d == 0.0 => CoefficientSequence::iid(),
            LinearBase::LinearLrd => power_law_coeffs(T::lit(self.alpha()), k, T::one())?,
        };
        Ok(self.scaled(raw))
    }

    /// Linear-filter weights behind the process for a sample of length `n`.
    pub fn coefficients<T: Scalar>(&self, n: usize) -> Result<CoefficientSequence<T>> {
        self.validate()?;
        let k = self.truncation_for(n);
        match &self.family {
            Family::Iid => Ok(CoefficientSequence::iid()),
            Family::LinearLrd => self.base_coefficients(LinearBase::LinearLrd, k),
            Family::Farima | Family::FarimaGarch { .. } => self.base_coefficients(LinearBase::Farima, k),
            Family::FunctionalOfLinear { base, .. } => self.base_coefficients(*base, k),
            Family::StochasticVolatility { .. } => linear_lrd_coeffs(T::lit(self.alpha()), k),
            Family::Larch { energy, .. } => {
                let b = volatility::larch_coeffs(T::lit(self.alpha()), k, T::lit(*energy))?;
                let mut v = b;
                v[0] = T::one();
                CoefficientSequence::new(v, T::lit(self.alpha()))
            }
        }
    }

    /// Runs any expensive one-off preparation (the abs-power centering pre-run)
    /// so that repeated simulations reuse it.
    pub fn prepared(mut self, n: usize) -> Result<Self> {
        self.validate()?;
        if let Family::FunctionalOfLinear { base, transform } = self.family.clone() {
            let c = self.base_coefficients::<f64>(base, self.truncation_for(n))?;
            let t = transform.centered(&c, split_seed(CENTERING_SEED, &[]))?;
            self.family = Family::FunctionalOfLinear { base, transform: t };
        }
        Ok(self)
    }

    pub fn simulate<T: Scalar>(&self, n: usize) -> Result<Vec<T>> {
        Ok(self.simulate_path(n)?.eps)
    }

    /// Errors plus conditional means. Conditional means are exact for the
    /// linear, GARCH-filtered, volatility and square-functional families.
    pub fn simulate_path<T: Scalar>(&self, n: usize) -> Result<ConditionalPath<T>> {
        if n == 0 {
            return Err(Error::EmptyRequest("sample length must be positive"));
        }
        let spec = self.clone().prepared(n)?;
        let k = spec.truncation_for(n);
        let burn = spec.burn_in_for(n);
        let innov = &spec.innovation;
        let zeros = || Some(vec![T::zero(); n]);
        match &spec.family {
            Family::Iid => {
                let eps = crate::innovations::draw_innovations(innov, n)?;
                Ok(ConditionalPath { eps, cond_mean: zeros() })
            }
            Family::LinearLrd | Family::Farima => {
                let c = spec.coefficients::<T>(n)?;
                let dec = conditional_mean_decomposition(&c, innov, n, burn)?;
                Ok(ConditionalPath { eps: dec.eps, cond_mean: Some(dec.eps_pred) })
            }
            Family::FunctionalOfLinear { transform, .. } => {
                let c = spec.coefficients::<T>(n)?;
                let p = simulate_functional_of_linear(&c, *transform, innov, n, burn)?;
                Ok(ConditionalPath { eps: p.eps, cond_mean: p.cond_mean })
            }
            Family::FarimaGarch { garch } => {
                let c = spec.coefficients::<T>(n)?;
                let (eps, pred) = volatility::filtered_garch(&c, garch, innov, n, burn)?;
                Ok(ConditionalPath { eps, cond_mean: Some(pred) })
            }
            Family::StochasticVolatility { level } => {
                let c = spec.coefficients::<T>(n)?;
                let p = volatility::simulate_stochastic_volatility(&c, T::lit(*level), innov, n, burn)?;
                Ok(ConditionalPath { eps: p.eps, cond_mean: zeros() })
            }
            Family::Larch { level, energy } => {
                let b = volatility::larch_coeffs(T::lit(spec.alpha()), k, T::lit(*energy))?;
                let p = volatility::simulate_larch(&b, T::lit(*level), innov, n, burn)?;
                Ok(ConditionalPath { eps: p.eps, cond_mean: zeros() })
            }
        }
    }

    /// Split into predictable part and innovation term; linear families only.
    pub fn decomposition<T: Scalar>(&self, n: usize) -> Result<LinearDecomposition<T>> {
        match self.family {
            Family::Iid | Family::LinearLrd | Family::Farima => {
                let c = self.coefficients::<T>(n)?;
                conditional_mean_decomposition(&c, &self.innovation, n, self.burn_in_for(n))
            }
            _ => Err(Error::Unsupported(format!(
                "no linear decomposition for the {} family",
                self.family.name()
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dispatch_reproducible() {
        let s = ProcessSpec::farima(0.3, InnovationSpec::gaussian(5)).with_truncation(500);
        let a = s.simulate::<f64>(100).unwrap();
        let b = s.simulate::<f64>(100).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn default_truncation_tracks_n() {
        let s = ProcessSpec::farima(0.3, InnovationSpec::gaussian(5));
        assert_eq!(s.truncation_for(100), 5000);
        assert_eq!(s.truncation_for(9000), 9000);
        assert_eq!(s.burn_in_for(100), 5000);
    }

    #[test]
    fn invalid_specs() {
        let g = InnovationSpec::gaussian(1);
        assert!(ProcessSpec::linear_lrd(1.2, g).validate().is_err());
        assert!(ProcessSpec::farima(0.5, g).validate().is_err());
        assert!(ProcessSpec::farima(-0.3, g).validate().is_ok());
        assert!(ProcessSpec::farima(0.3, g).with_truncation(100).with_burn_in(50).validate().is_err());
        assert!(matches!(
            ProcessSpec::larch(0.5, 1.0, 1.0, g).validate(),
            Err(Error::Stationarity(_))
        ));
        assert!(ProcessSpec::stochastic_volatility(0.5, 0.0, g).validate().is_err());
    }

    #[test]
    fn decomposition_only_for_linear() {
        let g = InnovationSpec::gaussian(1);
        let sv = ProcessSpec::stochastic_volatility(0.5, 1.0, g).with_truncation(50);
        assert!(matches!(sv.decomposition::<f64>(10), Err(Error::Unsupported(_))));
        let lin = ProcessSpec::farima(0.2, g).with_truncation(50);
        let dec = lin.decomposition::<f64>(10).unwrap();
        assert_eq!(dec.eps, lin.simulate::<f64>(10).unwrap());
    }

    #[test]
    fn every_family_simulates() {
        let g = InnovationSpec::gaussian(8);
        let specs = [
            ProcessSpec::iid(g),
            ProcessSpec::linear_lrd(0.5, g),
            ProcessSpec::farima(0.2, g),
            ProcessSpec::functional(LinearBase::Farima, 0.6, Transform::Square, g),
            ProcessSpec::farima_garch(0.2, GarchParams::new(0.1, vec![0.1], vec![0.8]), g),
            ProcessSpec::stochastic_volatility(0.5, 1.0, g),
            ProcessSpec::larch(0.5, 1.0, 0.3, g),
        ];
        for s in specs {
            let s = s.with_truncation(200);
            let p = s.simulate_path::<f64>(50).unwrap();
            assert_eq!(p.eps.len(), 50, "{}", s.family.name());
            assert!(p.eps.iter().all(|e| e.is_finite()));
        }
    }

    #[test]
    fn unit_variance_scaling() {
        let s = ProcessSpec::farima(0.3, InnovationSpec::gaussian(2)).with_truncation(1000);
        let c = s.coefficients::<f64>(10).unwrap();
        assert!((c.square_sum() - 1.0).abs() < 1e-12);
        let raw = s.clone().with_scale(ErrorScale::UnitInnovation).coefficients::<f64>(10).unwrap();
        assert_eq!(raw.leading(), 1.0);
    }
}
