//! Kernel density, Nadaraya–Watson and shape-function estimators.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::functions::{DesignDensity, TrueFunction};
use crate::kernel::KernelSpec;
use crate::processes::{simulate_predictors, PredictorSpec, ProcessSpec};
use crate::scalar::Scalar;

/// Grid points whose density estimate falls below this value are flagged
/// instead of evaluated (`sum K < n h * DENSITY_FLOOR`).
pub const DENSITY_FLOOR: f64 = 1e-3;

/// Everything needed to regenerate a synthetic sample bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub truth: TrueFunction,
    #[serde(default)]
    pub design: DesignDensity,
    pub errors: ProcessSpec,
    pub predictors: PredictorSpec,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionSample<T> {
    x: Vec<T>,
    y: Vec<T>,
    truth: Option<TrueFunction>,
    eps: Option<Vec<T>>,
    meta: Option<SampleMeta>,
}

fn map_design<T: Scalar>(design: DesignDensity, z: Vec<T>) -> Vec<T> {
    match design {
        DesignDensity::StandardNormal => z,
        DesignDensity::Uniform => {
            use statrs::distribution::{ContinuousCDF, Normal};
            let phi = Normal::new(0.0, 1.0).expect("unit normal");
            z.into_iter().map(|v| T::lit(phi.cdf(v.as_f64()))).collect()
        }
    }
}

impl<T: Scalar> RegressionSample<T> {
    pub fn from_arrays(x: Vec<T>, y: Vec<T>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Data(format!("{} predictors but {} responses", x.len(), y.len())));
        }
        if x.len() < 2 {
            return Err(Error::Data("a sample needs at least two observations".into()));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::Data("non-finite observation".into()));
        }
        Ok(Self { x, y, truth: None, eps: None, meta: None })
    }

    /// Noise-free sample `y = m(x)`.
    pub fn noiseless(x: Vec<T>, truth: TrueFunction) -> Result<Self> {
        let y = x.iter().map(|&v| T::lit(truth.value(v.as_f64()))).collect();
        let n = x.len();
        Ok(Self::from_arrays(x, y)?.with_truth(truth).with_errors(vec![T::zero(); n]))
    }

    /// Draws predictors and errors from `meta` and forms `y = m(x) + eps`.
    /// In the uniform design the Gaussian predictors pass through the normal CDF.
    pub fn generate(meta: SampleMeta) -> Result<Self> {
        let z = simulate_predictors::<T>(&meta.predictors, meta.n)?;
        let x = map_design(meta.design, z);
        let eps = meta.errors.simulate::<T>(meta.n)?;
        let y = x
            .iter()
            .zip(&eps)
            .map(|(&xi, &e)| T::lit(meta.truth.value(xi.as_f64())) + e)
            .collect();
        let mut s = Self::from_arrays(x, y)?;
        s.truth = Some(meta.truth);
        s.eps = Some(eps);
        s.meta = Some(meta);
        Ok(s)
    }

    pub fn regenerate(&self) -> Result<Self> {
        let meta = self.meta.clone().ok_or_else(|| Error::Unsupported("sample has no generating metadata".into()))?;
        Self::generate(meta)
    }

    pub fn with_truth(mut self, truth: TrueFunction) -> Self {
        self.truth = Some(truth);
        self
    }

    pub fn with_errors(mut self, eps: Vec<T>) -> Self {
        assert_eq!(eps.len(), self.x.len(), "error vector length");
        self.eps = Some(eps);
        self
    }

    /// Same design, responses replaced. Error metadata is dropped.
    pub fn with_responses(&self, y: Vec<T>) -> Result<Self> {
        let mut s = Self::from_arrays(self.x.clone(), y)?;
        s.truth = self.truth;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x(&self) -> &[T] {
        &self.x
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    pub fn truth(&self) -> Option<TrueFunction> {
        self.truth
    }

    pub fn errors(&self) -> Option<&[T]> {
        self.eps.as_deref()
    }

    pub fn meta(&self) -> Option<&SampleMeta> {
        self.meta.as_ref()
    }

    pub fn mean_response(&self) -> T {
        self.y.iter().copied().sum::<T>() / T::from_usize_lossy(self.len())
    }
}

/// Values of an estimate on a grid. Flagged points hold zero.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateGrid<T> {
    pub points: Vec<T>,
    pub values: Vec<T>,
    pub flagged: Vec<bool>,
    pub bandwidth: T,
}

impl<T: Scalar> EstimateGrid<T> {
    pub fn flagged_count(&self) -> usize {
        self.flagged.iter().filter(|&&f| f).count()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,value,flagged\n");
        for ((x, v), f) in self.points.iter().zip(&self.values).zip(&self.flagged) {
            let _ = writeln!(s, "{x},{v},{}", u8::from(*f));
        }
        s
    }
}

/// Observations sorted by predictor, remembering their time index, so that
/// compact-kernel sums only visit the points inside the window.
#[derive(Debug, Clone)]
pub struct Smoother<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    idx: Vec<usize>,
}

impl<T: Scalar> Smoother<T> {
    pub fn new(x: &[T], y: &[T]) -> Self {
        assert_eq!(x.len(), y.len());
        let mut idx: Vec<usize> = (0..x.len()).collect();
        idx.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).expect("finite predictors"));
        let xs = idx.iter().map(|&i| x[i]).collect();
        let ys = idx.iter().map(|&i| y[i]).collect();
        Self { xs, ys, idx }
    }

    pub fn from_sample(sample: &RegressionSample<T>) -> Self {
        Self::new(sample.x(), sample.y())
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    fn window(&self, x0: T, reach: T) -> std::ops::Range<usize> {
        let lo = self.xs.partition_point(|&v| v < x0 - reach);
        let hi = self.xs.partition_point(|&v| v <= x0 + reach);
        lo..hi.max(lo)
    }

    /// `(sum K((x0 - X_j)/h), sum Y_j K((x0 - X_j)/h))`, skipping time indices
    /// within `radius` of `center` when `skip = Some((center, radius))`.
    pub fn kernel_sums(&self, kernel: &KernelSpec, h: T, x0: T, skip: Option<(usize, usize)>) -> (T, T) {
        let reach = h * T::lit(kernel.radius());
        let (mut sk, mut sky) = (T::zero(), T::zero());
        for q in self.window(x0, reach) {
            if let Some((c, r)) = skip {
                if self.idx[q].abs_diff(c) <= r {
                    continue;
                }
            }
            let k = kernel.eval((x0 - self.xs[q]) / h);
            sk = sk + k;
            sky = sky + k * self.ys[q];
        }
        (sk, sky)
    }

    fn floor(&self, h: T) -> T {
        T::from_usize_lossy(self.len()) * h * T::lit(DENSITY_FLOOR)
    }

    pub fn density(&self, kernel: &KernelSpec, h: T, grid: &[T]) -> Vec<T> {
        let nh = T::from_usize_lossy(self.len()) * h;
        grid.iter().map(|&x0| self.kernel_sums(kernel, h, x0, None).0 / nh).collect()
    }

    /// Nadaraya–Watson values and floor flags on a grid.
    pub fn nw(&self, kernel: &KernelSpec, h: T, grid: &[T]) -> (Vec<T>, Vec<bool>) {
        let floor = self.floor(h);
        grid.iter()
            .map(|&x0| {
                let (sk, sky) = self.kernel_sums(kernel, h, x0, None);
                if sk < floor || sk <= T::zero() {
                    (T::zero(), true)
                } else {
                    (sky / sk, false)
                }
            })
            .unzip()
    }

    /// Nadaraya–Watson fits at the observations, in time order. With
    /// `leave_out = Some(l)` the fit at `i` ignores every `j` with `|i - j| <= l`.
    pub fn fit_at_samples(&self, kernel: &KernelSpec, h: T, leave_out: Option<usize>) -> (Vec<T>, Vec<bool>) {
        let n = self.len();
        let floor = self.floor(h);
        let mut values = vec![T::zero(); n];
        let mut flagged = vec![false; n];
        for p in 0..n {
            let i = self.idx[p];
            let (sk, sky) = self.kernel_sums(kernel, h, self.xs[p], leave_out.map(|l| (i, l)));
            if sk < floor || sk <= T::zero() {
                flagged[i] = true;
            } else {
                values[i] = sky / sk;
            }
        }
        (values, flagged)
    }
}

fn check_bandwidth<T: Scalar>(h: T) -> Result<()> {
    if h > T::zero() && h.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("bandwidth {h} must be positive")))
    }
}

/// `f_h(x) = (n h)^{-1} sum K((x - X_i)/h)`.
pub fn density_estimate<T: Scalar>(x: &[T], kernel: &KernelSpec, h: T, grid: &[T]) -> Result<EstimateGrid<T>> {
    check_bandwidth(h)?;
    if x.is_empty() {
        return Err(Error::EmptyRequest("density estimate needs data"));
    }
    let sm = Smoother::new(x, &vec![T::zero(); x.len()]);
    Ok(EstimateGrid {
        points: grid.to_vec(),
        values: sm.density(kernel, h, grid),
        flagged: vec![false; grid.len()],
        bandwidth: h,
    })
}

pub fn nw_estimate<T: Scalar>(
    sample: &RegressionSample<T>,
    kernel: &KernelSpec,
    h: T,
    grid: &[T],
) -> Result<EstimateGrid<T>> {
    check_bandwidth(h)?;
    let (values, flagged) = Smoother::from_sample(sample).nw(kernel, h, grid);
    Ok(EstimateGrid { points: grid.to_vec(), values, flagged, bandwidth: h })
}

/// `m*_h(x) = m_h(x) - mean(Y)`. Flagged points stay at zero.
pub fn shape_estimate<T: Scalar>(
    sample: &RegressionSample<T>,
    kernel: &KernelSpec,
    h: T,
    grid: &[T],
) -> Result<EstimateGrid<T>> {
    let mut est = nw_estimate(sample, kernel, h, grid)?;
    let ybar = sample.mean_response();
    for (v, &f) in est.values.iter_mut().zip(&est.flagged) {
        if !f {
            *v = *v - ybar;
        }
    }
    Ok(est)
}

/// Leading bias `h^2 kappa2 rho(x) / (2 f(x))` with `rho = m'' f + 2 m' f'`.
pub fn bias_approx(m: TrueFunction, f: DesignDensity, kernel: &KernelSpec, h: f64, x: f64) -> Result<f64> {
    let fx = f.pdf(x);
    if !(fx >= DENSITY_FLOOR) {
        return Err(domain(format!("design density {fx} at {x} is below the floor")));
    }
    let rho = m.d2(x) * fx + 2.0 * m.d1(x) * f.d1(x);
    Ok(h * h * kernel.kappa2 * rho / (2.0 * fx))
}
