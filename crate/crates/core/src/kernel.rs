use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Truncation radius of the Gaussian kernel.
pub const GAUSSIAN_RADIUS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum KernelShape {
    #[default]
    Epanechnikov,
    /// Standard normal density restricted to `[-4, 4]` and renormalized.
    GaussianTruncated,
    Quartic,
}

fn gaussian_norm() -> f64 {
    static NORM: OnceLock<f64> = OnceLock::new();
    *NORM.get_or_init(|| {
        let mass = statrs::function::erf::erf(GAUSSIAN_RADIUS / std::f64::consts::SQRT_2);
        1.0 / ((std::f64::consts::TAU).sqrt() * mass)
    })
}

impl KernelShape {
    pub fn name(self) -> &'static str {
        match self {
            KernelShape::Epanechnikov => "epanechnikov",
            KernelShape::GaussianTruncated => "gaussian-truncated",
            KernelShape::Quartic => "quartic",
        }
    }

    /// Half-width of the support.
    pub fn radius(self) -> f64 {
        match self {
            KernelShape::GaussianTruncated => GAUSSIAN_RADIUS,
            _ => 1.0,
        }
    }

    #[inline]
    pub fn eval<T: Scalar>(self, u: T) -> T {
        let a = u.abs();
        match self {
            KernelShape::Epanechnikov => {
                if a <= T::one() {
                    T::lit(0.75) * (T::one() - u * u)
                } else {
                    T::zero()
                }
            }
            KernelShape::Quartic => {
                if a <= T::one() {
                    let w = T::one() - u * u;
                    T::lit(15.0 / 16.0) * w * w
                } else {
                    T::zero()
                }
            }
            KernelShape::GaussianTruncated => {
                if a <= T::lit(GAUSSIAN_RADIUS) {
                    T::lit(gaussian_norm()) * (-(u * u) / T::lit(2.0)).exp()
                } else {
                    T::zero()
                }
            }
        }
    }

    /// Integral of `u^p K(u)^q` over the support, by double-exponential quadrature.
    pub fn quadrature_moment(self, p: i32, q: i32) -> f64 {
        let r = self.radius();
        quadrature::double_exponential::integrate(|u| u.powi(p) * self.eval(u).powi(q), -r, r, 1e-13).integral
    }
}

/// Kernel shape with its moments `kappa1 = int K^2` and `kappa2 = int u^2 K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub shape: KernelShape,
    pub kappa1: f64,
    pub kappa2: f64,
}

impl KernelSpec {
    pub fn new(shape: KernelShape) -> Self {
        let (kappa1, kappa2) = kernel_moments(shape);
        Self { shape, kappa1, kappa2 }
    }

    #[inline]
    pub fn eval<T: Scalar>(&self, u: T) -> T {
        self.shape.eval(u)
    }

    pub fn radius(&self) -> f64 {
        self.shape.radius()
    }
}

impl Default for KernelSpec {
    fn default() -> Self {
        Self::new(KernelShape::default())
    }
}

impl From<KernelShape> for KernelSpec {
    fn from(shape: KernelShape) -> Self {
        Self::new(shape)
    }
}

/// `(kappa1, kappa2)`: closed forms for the polynomial kernels, quadrature for
/// the truncated Gaussian.
pub fn kernel_moments(shape: KernelShape) -> (f64, f64) {
    match shape {
        KernelShape::Epanechnikov => (3.0 / 5.0, 1.0 / 5.0),
        KernelShape::Quartic => (5.0 / 7.0, 1.0 / 7.0),
        KernelShape::GaussianTruncated => (shape.quadrature_moment(0, 2), shape.quadrature_moment(2, 1)),
    }
}
