//! Nonparametric regression with long-range dependent errors: error process
//! simulation, kernel smoothers, risk criteria and bandwidth conditions.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the bottom fix the common `f64` instantiations.

pub mod conditions;
pub mod error;
pub mod estimator;
pub mod filter;
pub mod functions;
pub mod innovations;
pub mod kernel;
pub mod processes;
pub mod risk;
pub mod scalar;
pub mod scaling;

pub use error::{Error, Result};
pub use innovations::{draw_innovations, split_seed, InnovationLaw, InnovationSpec};
pub use processes::{CoefficientSequence, ErrorScale, Family, ProcessSpec};
pub use estimator::{EstimateGrid, RegressionSample, SampleMeta};
pub use functions::{DesignDensity, TrueFunction};
pub use kernel::{KernelShape, KernelSpec};
pub use scalar::Scalar;

pub type Coefficients = CoefficientSequence<f64>;
pub type Sample = RegressionSample<f64>;
pub type Estimate = EstimateGrid<f64>;
pub type ExactExponent = num_rational::Ratio<i64>;
