//! TOML experiment configuration. See `configs/` for annotated examples.

use std::path::{Path, PathBuf};

use lrd_regression::processes::{ErrorScale, GarchParams, LinearBase, PredictorMode, PredictorSpec, Transform};
use lrd_regression::{InnovationLaw, InnovationSpec, KernelShape, ProcessSpec, TrueFunction};
use serde::{Deserialize, Serialize};

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorFamily {
    Farima,
    LinearLrd,
    FunctionalSquare,
    FarimaGarch,
    StochasticVolatility,
    Larch,
    /// No noise at all; `y = m(x)`.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorsConfig {
    #[serde(default = "default_family")]
    pub family: ErrorFamily,
    #[serde(default = "default_error_scale")]
    pub scale: ErrorScale,
    #[serde(default)]
    pub law: InnovationLaw,
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    #[serde(default)]
    pub garch: Option<GarchParams>,
    /// Level `a` of the volatility families.
    #[serde(default = "default_level")]
    pub level: f64,
    /// `sum c_k^2` of the LARCH weights.
    #[serde(default = "default_energy")]
    pub energy: f64,
}

fn default_family() -> ErrorFamily {
    ErrorFamily::Farima
}
fn default_error_scale() -> ErrorScale {
    ErrorScale::UnitInnovation
}
fn default_truncation() -> usize {
    5000
}
fn default_level() -> f64 {
    1.0
}
fn default_energy() -> f64 {
    0.5
}

impl Default for ErrorsConfig {
    fn default() -> Self {
        Self {
            family: default_family(),
            scale: default_error_scale(),
            law: InnovationLaw::default(),
            truncation: default_truncation(),
            garch: None,
            level: default_level(),
            energy: default_energy(),
        }
    }
}

impl ErrorsConfig {
    /// Process for memory parameter `d`, or `None` for the zero-noise family.
    pub fn process(&self, d: f64, seed: u64) -> Option<ProcessSpec> {
        let innov = InnovationSpec { law: self.law, seed };
        let alpha = 1.0 - 2.0 * d;
        let spec = match self.family {
            ErrorFamily::Zero => return None,
            ErrorFamily::Farima => ProcessSpec::farima(d, innov),
            ErrorFamily::LinearLrd => ProcessSpec::linear_lrd(alpha, innov),
            ErrorFamily::FunctionalSquare => ProcessSpec::functional(LinearBase::Farima, alpha, Transform::Square, innov),
            ErrorFamily::FarimaGarch => ProcessSpec::farima_garch(
                d,
                self.garch.clone().unwrap_or_else(|| GarchParams::new(0.1, vec![0.1], vec![0.8])),
                innov,
            ),
            ErrorFamily::StochasticVolatility => ProcessSpec::stochastic_volatility(alpha, self.level, innov),
            ErrorFamily::Larch => ProcessSpec::larch(alpha, self.level, self.energy, innov),
        };
        Some(spec.with_truncation(self.truncation).with_scale(self.scale))
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.family, ErrorFamily::Farima | ErrorFamily::LinearLrd)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictorsConfig {
    #[serde(default)]
    pub mode: PredictorMode,
    /// `d_X = (1 - alpha_X) / 2`, used in LRD mode.
    #[serde(default)]
    pub d_x: f64,
    #[serde(default = "default_truncation")]
    pub truncation: usize,
}

impl Default for PredictorsConfig {
    fn default() -> Self {
        Self { mode: PredictorMode::IidGaussian, d_x: 0.0, truncation: default_truncation() }
    }
}

impl PredictorsConfig {
    pub fn alpha_x(&self) -> f64 {
        match self.mode {
            PredictorMode::IidGaussian => 1.0,
            PredictorMode::LrdGaussian => 1.0 - 2.0 * self.d_x,
        }
    }

    pub fn spec(&self, seed: u64) -> PredictorSpec {
        match self.mode {
            PredictorMode::IidGaussian => PredictorSpec::iid(seed),
            PredictorMode::LrdGaussian => PredictorSpec::lrd(self.alpha_x(), seed).with_truncation(self.truncation),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandwidthConfig {
    /// Explicit bandwidths (table experiments).
    #[serde(default)]
    pub values: Vec<f64>,
    /// Log-spaced grid `[grid_lo, grid_hi]` (CV and rate experiments).
    #[serde(default = "default_grid_lo")]
    pub grid_lo: f64,
    #[serde(default = "default_grid_hi")]
    pub grid_hi: f64,
    #[serde(default = "default_grid_count")]
    pub grid_count: usize,
    /// CV leave-out radius `l`.
    #[serde(default)]
    pub leave_out: usize,
}

fn default_grid_lo() -> f64 {
    0.02
}
fn default_grid_hi() -> f64 {
    2.0
}
fn default_grid_count() -> usize {
    25
}

impl Default for BandwidthConfig {
    fn default() -> Self {
        Self {
            values: vec![0.05, 1.0],
            grid_lo: default_grid_lo(),
            grid_hi: default_grid_hi(),
            grid_count: default_grid_count(),
            leave_out: 0,
        }
    }
}

impl BandwidthConfig {
    pub fn grid(&self) -> Vec<f64> {
        lrd_regression::risk::log_grid(self.grid_lo, self.grid_hi, self.grid_count)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesConfig {
    pub n_ladder: Vec<usize>,
    /// Memory exponents of the errors; `1` is the i.i.d. case.
    pub alphas: Vec<f64>,
}

impl Default for RatesConfig {
    fn default() -> Self {
        Self { n_ladder: vec![200, 400, 800, 1600, 3200], alphas: vec![0.9, 0.3] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionsConfig {
    pub alphas: Vec<f64>,
    #[serde(default = "default_alpha_x")]
    pub alpha_x: f64,
    /// Exponents `beta` of the rules `h = n^{-beta}`.
    pub betas: Vec<f64>,
    /// Exponents used by the Monte Carlo (A) checks.
    #[serde(default = "default_mc_betas")]
    pub mc_betas: Vec<f64>,
    #[serde(default = "default_ladder_lo")]
    pub ladder_lo: u32,
    #[serde(default = "default_ladder_hi")]
    pub ladder_hi: u32,
    /// Error families checked by Monte Carlo.
    #[serde(default)]
    pub families: Vec<ErrorFamily>,
}

fn default_alpha_x() -> f64 {
    1.0
}
fn default_mc_betas() -> Vec<f64> {
    vec![0.0, 0.5, 1.0]
}
fn default_ladder_lo() -> u32 {
    8
}
fn default_ladder_hi() -> u32 {
    13
}

impl Default for ConditionsConfig {
    fn default() -> Self {
        Self {
            alphas: vec![0.4, 0.9],
            alpha_x: 1.0,
            betas: vec![0.2, 0.5],
            mc_betas: default_mc_betas(),
            ladder_lo: default_ladder_lo(),
            ladder_hi: default_ladder_hi(),
            families: vec![ErrorFamily::Farima],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub n: usize,
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; `0` uses every available core.
    #[serde(default)]
    pub workers: usize,
    #[serde(default = "default_d_ladder")]
    pub d_ladder: Vec<f64>,
    #[serde(default)]
    pub truth: TrueFunction,
    #[serde(default)]
    pub kernel: KernelShape,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub errors: ErrorsConfig,
    #[serde(default)]
    pub predictors: PredictorsConfig,
    #[serde(default)]
    pub bandwidth: BandwidthConfig,
    #[serde(default)]
    pub rates: Option<RatesConfig>,
    #[serde(default)]
    pub conditions: Option<ConditionsConfig>,
}

fn default_d_ladder() -> Vec<f64> {
    (0..10).map(|i| i as f64 * 0.05).collect()
}

fn invalid(path: &str, msg: impl std::fmt::Display) -> HarnessError {
    HarnessError::Config(format!("{path}: {msg}"))
}

impl ExperimentConfig {
    pub fn new(experiment: &str, n: usize, replicates: usize) -> Self {
        Self {
            experiment: experiment.to_string(),
            n,
            replicates,
            seed: 0,
            workers: 0,
            d_ladder: default_d_ladder(),
            truth: TrueFunction::default(),
            kernel: KernelShape::default(),
            output: None,
            errors: ErrorsConfig::default(),
            predictors: PredictorsConfig::default(),
            bandwidth: BandwidthConfig::default(),
            rates: None,
            conditions: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            HarnessError::Config(m) => HarnessError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.experiment.trim().is_empty() {
            return Err(invalid("experiment", "must not be empty"));
        }
        if self.n < 2 {
            return Err(invalid("n", "needs at least two observations"));
        }
        if self.replicates == 0 {
            return Err(invalid("replicates", "must be at least 1"));
        }
        if self.d_ladder.is_empty() {
            return Err(invalid("d_ladder", "must not be empty"));
        }
        for (i, &d) in self.d_ladder.iter().enumerate() {
            if !(0.0..0.5).contains(&d) {
                return Err(invalid(&format!("d_ladder[{i}]"), format!("{d} outside [0, 0.5)")));
            }
        }
        if self.errors.truncation == 0 {
            return Err(invalid("errors.truncation", "must be at least 1"));
        }
        if let Some(g) = &self.errors.garch {
            g.validate().map_err(|e| invalid("errors.garch", e))?;
        }
        if !(self.errors.level > 0.0) {
            return Err(invalid("errors.level", "must be positive"));
        }
        if !(self.errors.energy > 0.0 && self.errors.energy < 1.0) {
            return Err(invalid("errors.energy", "must lie in (0, 1)"));
        }
        if self.predictors.mode == PredictorMode::LrdGaussian && !(0.0..0.5).contains(&self.predictors.d_x) {
            return Err(invalid("predictors.d_x", format!("{} outside [0, 0.5)", self.predictors.d_x)));
        }
        let b = &self.bandwidth;
        for (i, &h) in b.values.iter().enumerate() {
            if !(h > 0.0 && h.is_finite()) {
                return Err(invalid(&format!("bandwidth.values[{i}]"), "must be positive"));
            }
        }
        if !(b.grid_lo > 0.0 && b.grid_hi > b.grid_lo) {
            return Err(invalid("bandwidth.grid_lo", "need 0 < grid_lo < grid_hi"));
        }
        if b.grid_count < 5 {
            return Err(invalid("bandwidth.grid_count", "need at least five bandwidths"));
        }
        if self.n <= 2 * b.leave_out + 1 {
            return Err(invalid("bandwidth.leave_out", "too large for the sample size"));
        }
        if let Some(r) = &self.rates {
            if r.n_ladder.len() < 4 {
                return Err(invalid("rates.n_ladder", "needs at least four sample sizes"));
            }
            for (i, &n) in r.n_ladder.iter().enumerate() {
                if n < 2 * b.leave_out + 2 {
                    return Err(invalid(&format!("rates.n_ladder[{i}]"), "too small"));
                }
            }
            if r.alphas.is_empty() {
                return Err(invalid("rates.alphas", "must not be empty"));
            }
            for (i, &a) in r.alphas.iter().enumerate() {
                if !(a > 0.0 && a <= 1.0) {
                    return Err(invalid(&format!("rates.alphas[{i}]"), format!("{a} outside (0, 1]")));
                }
            }
        }
        if let Some(c) = &self.conditions {
            for (i, &a) in c.alphas.iter().enumerate() {
                if !(a > 0.0 && a <= 1.0) {
                    return Err(invalid(&format!("conditions.alphas[{i}]"), format!("{a} outside (0, 1]")));
                }
            }
            if !(c.alpha_x > 0.0 && c.alpha_x <= 1.0) {
                return Err(invalid("conditions.alpha_x", "outside (0, 1]"));
            }
            for (key, list) in [("betas", &c.betas), ("mc_betas", &c.mc_betas)] {
                for (i, &beta) in list.iter().enumerate() {
                    if !(beta >= 0.0 && beta.is_finite()) {
                        return Err(invalid(&format!("conditions.{key}[{i}]"), "must be non-negative"));
                    }
                }
            }
            if c.ladder_lo >= c.ladder_hi || c.ladder_hi > 20 {
                return Err(invalid("conditions.ladder_hi", "need ladder_lo < ladder_hi <= 20"));
            }
        }
        Ok(())
    }
}
