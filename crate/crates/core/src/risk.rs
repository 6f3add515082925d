//! Empirical risks (ASE, CV, discretized ISE), asymptotic MISE formulas and
//! bandwidth minimization.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::estimator::{EstimateGrid, RegressionSample, Smoother};
use crate::functions::{DesignDensity, TrueFunction};
use crate::kernel::KernelSpec;
use crate::processes::{partial_sum_variance_oracle, CoefficientSequence};
use crate::scalar::Scalar;

/// Number of points of the default evaluation grid.
pub const EVAL_POINTS: usize = 201;
/// Design mass covered by the default evaluation grid.
pub const EVAL_MASS: f64 = 0.98;

/// Trapezoid grid for `int g(x) r(x) dx` with `r = f` on a central range.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalGrid {
    pub points: Vec<f64>,
    /// Trapezoid weight times `r(x)` at each point.
    pub weights: Vec<f64>,
}

impl EvalGrid {
    pub fn new(design: DesignDensity, count: usize, mass: f64) -> Self {
        let (lo, hi) = design.central_range(mass);
        Self::on_range(lo, hi, count, |x| design.pdf(x))
    }

    pub fn on_range(lo: f64, hi: f64, count: usize, r: impl Fn(f64) -> f64) -> Self {
        assert!(count >= 2 && hi > lo);
        let step = (hi - lo) / (count - 1) as f64;
        let points: Vec<f64> = (0..count).map(|i| lo + step * i as f64).collect();
        let weights = points
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let t = if i == 0 || i == count - 1 { 0.5 } else { 1.0 };
                t * step * r(x)
            })
            .collect();
        Self { points, weights }
    }

    pub fn range(&self) -> (f64, f64) {
        (self.points[0], *self.points.last().expect("non-empty grid"))
    }

    pub fn points_as<T: Scalar>(&self) -> Vec<T> {
        self.points.iter().map(|&p| T::lit(p)).collect()
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }
}

/// Which observations enter ASE and CV.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum RiskWeight {
    #[default]
    All,
    /// Indicator of `[lo, hi]`; with a density-weighted ISE this matches `r = f`
    /// restricted to the same range.
    Range(f64, f64),
}

impl RiskWeight {
    fn admits(self, x: f64) -> bool {
        match self {
            RiskWeight::All => true,
            RiskWeight::Range(lo, hi) => (lo..=hi).contains(&x),
        }
    }
}

/// An empirical criterion together with the number of observations skipped
/// because their fit was flagged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Criterion<T> {
    pub value: T,
    pub flagged: usize,
}

fn checked_h<T: Scalar>(h: T) -> Result<()> {
    if h > T::zero() && h.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("bandwidth {h} must be positive")))
    }
}

/// `n^{-1} sum w(X_i) (m_h(X_i) - m(X_i))^2`.
pub fn ase<T: Scalar>(sample: &RegressionSample<T>, kernel: &KernelSpec, h: T, weight: RiskWeight) -> Result<Criterion<T>> {
    checked_h(h)?;
    let truth = sample
        .truth()
        .ok_or_else(|| Error::Unsupported("ASE needs the true regression function".into()))?;
    ase_with(&Smoother::from_sample(sample), sample.x(), truth, kernel, h, weight)
}

/// ASE against a pre-built smoother, for sweeps over many bandwidths.
pub fn ase_with<T: Scalar>(
    sm: &Smoother<T>,
    x: &[T],
    truth: TrueFunction,
    kernel: &KernelSpec,
    h: T,
    weight: RiskWeight,
) -> Result<Criterion<T>> {
    checked_h(h)?;
    let (fit, flagged) = sm.fit_at_samples(kernel, h, None);
    Ok(mean_square(x, &fit, &flagged, weight, |i| T::lit(truth.value(x[i].as_f64()))))
}

fn mean_square<T: Scalar>(
    x: &[T],
    fit: &[T],
    flagged: &[bool],
    weight: RiskWeight,
    target: impl Fn(usize) -> T,
) -> Criterion<T> {
    let mut acc = T::zero();
    let mut skipped = 0;
    for i in 0..x.len() {
        if !weight.admits(x[i].as_f64()) {
            continue;
        }
        if flagged[i] {
            skipped += 1;
            continue;
        }
        let r = fit[i] - target(i);
        acc = acc + r * r;
    }
    Criterion { value: acc / T::from_usize_lossy(x.len()), flagged: skipped }
}

/// `CV_l(h) = n^{-1} sum w(X_i) (Y_i - m_{i,h}(X_i))^2` where the fit at `i`
/// leaves out every `j` with `|i - j| <= l`.
pub fn cv_criterion<T: Scalar>(
    sample: &RegressionSample<T>,
    kernel: &KernelSpec,
    h: T,
    l: usize,
    weight: RiskWeight,
) -> Result<Criterion<T>> {
    cv_with(&Smoother::from_sample(sample), sample.x(), sample.y(), kernel, h, l, weight)
}

pub fn cv_with<T: Scalar>(
    sm: &Smoother<T>,
    x: &[T],
    y: &[T],
    kernel: &KernelSpec,
    h: T,
    l: usize,
    weight: RiskWeight,
) -> Result<Criterion<T>> {
    checked_h(h)?;
    if x.len() <= 2 * l + 1 {
        return Err(domain(format!("leave-out radius {l} too large for {} observations", x.len())));
    }
    let (fit, flagged) = sm.fit_at_samples(kernel, h, Some(l));
    Ok(mean_square(x, &fit, &flagged, weight, |i| y[i]))
}

/// `int (est - target)^2 r` on the evaluation grid. Flagged points carry no
/// estimate and are left out of the sum, as in [`ase`] and [`cv_criterion`].
pub fn ise_on_grid<T: Scalar>(est: &EstimateGrid<T>, grid: &EvalGrid, target: impl Fn(f64) -> f64) -> f64 {
    let sq: Vec<f64> = est
        .values
        .iter()
        .zip(&est.flagged)
        .zip(&grid.points)
        .map(|((v, &f), &x)| if f { 0.0 } else { (v.as_f64() - target(x)).powi(2) })
        .collect();
    grid.integrate(&sq)
}

/// Integrals and constants entering the asymptotic risk formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryConstants {
    /// `int r / f`.
    pub i_var: f64,
    /// `int (rho / f)^2 r` with `rho = m'' f + 2 m' f'`.
    pub i_bias: f64,
    /// `int (f'' / f) r`.
    pub i_fpp: f64,
    /// `Var(sum eps_i) / n^{2 - alpha}` at the reference length.
    pub c1_sq: f64,
    /// `Var(sum X_i) / n^{2 - alpha_X}` at the reference length.
    pub a1_sq: f64,
    /// `E[m(X) X]`.
    pub em_x: f64,
    /// `E[eps^2]`.
    pub sigma2: f64,
}

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    quadrature::double_exponential::integrate(f, a, b, 1e-12).integral
}

/// `Var(S_n) / n^{2 - alpha}` from the exact partial-sum oracle.
pub fn memory_constant(coeffs: &CoefficientSequence<f64>, alpha: f64, reference_n: usize) -> f64 {
    let n = reference_n as f64;
    partial_sum_variance_oracle(coeffs, reference_n) / n.powf(2.0 - alpha)
}

impl TheoryConstants {
    /// Constants for `r = f` on `[lo, hi]`.
    pub fn compute(
        m: TrueFunction,
        f: DesignDensity,
        (lo, hi): (f64, f64),
        errors: &CoefficientSequence<f64>,
        alpha: f64,
        predictors: &CoefficientSequence<f64>,
        alpha_x: f64,
        reference_n: usize,
    ) -> Self {
        let rho = |x: f64| m.d2(x) * f.pdf(x) + 2.0 * m.d1(x) * f.d1(x);
        let (a, b) = match f {
            DesignDensity::StandardNormal => (-12.0, 12.0),
            DesignDensity::Uniform => (0.0, 1.0),
        };
        Self {
            i_var: hi - lo,
            i_bias: integrate(|x| rho(x).powi(2) / f.pdf(x), lo, hi),
            i_fpp: integrate(|x| f.d2(x), lo, hi),
            c1_sq: memory_constant(errors, alpha, reference_n),
            a1_sq: memory_constant(predictors, alpha_x, reference_n),
            em_x: integrate(|x| m.value(x) * x * f.pdf(x), a, b),
            sigma2: errors.square_sum(),
        }
    }
}

/// Four-term asymptotic MISE of the Nadaraya–Watson estimator.
pub fn mise_theory(h: f64, n: usize, alpha: f64, c: &TheoryConstants, kernel: &KernelSpec) -> f64 {
    let nf = n as f64;
    let lrd = c.c1_sq * nf.powf(-alpha);
    c.sigma2 * kernel.kappa1 * c.i_var / (nf * h)
        + h.powi(4) * kernel.kappa2.powi(2) * c.i_bias / 4.0
        + lrd
        + lrd * h * h * kernel.kappa2 * c.i_fpp
}

/// Asymptotic MISE of the shape estimator, with the bias factor `h^4 / 2`.
pub fn mise_star_theory(h: f64, n: usize, alpha_x: f64, c: &TheoryConstants, kernel: &KernelSpec) -> f64 {
    let nf = n as f64;
    c.sigma2 * kernel.kappa1 * c.i_var / (nf * h)
        + h.powi(4) / 2.0 * c.i_bias
        + c.a1_sq * c.em_x * c.em_x * nf.powf(-alpha_x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `alpha > 2/5`.
    FifthRoot,
    /// `alpha < 2/5`.
    MemoryDominated,
    Boundary,
}

impl Regime {
    pub fn for_alpha(alpha: f64) -> Self {
        if alpha > 0.4 {
            Regime::FifthRoot
        } else if alpha < 0.4 {
            Regime::MemoryDominated
        } else {
            Regime::Boundary
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Regime::FifthRoot => "n^{-1/5}",
            Regime::MemoryDominated => "n^{-(1-alpha)/3}",
            Regime::Boundary => "n^{-1/5} = n^{-(1-alpha)/3}",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalBandwidth {
    pub h: f64,
    pub regime: Regime,
}

/// `count` log-spaced points from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

/// 25 log-spaced bandwidths over `[h/5, 5h]`.
pub fn default_h_grid(h_center: f64) -> Vec<f64> {
    log_grid(h_center / 5.0, h_center * 5.0, 25)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridMinimum {
    pub h: f64,
    pub index: usize,
    pub at_boundary: bool,
}

/// Argmin over an increasing bandwidth grid. Ties go to the smaller bandwidth;
/// a minimum at either end sets `at_boundary`.
pub fn minimize_over_grid(values: &[f64], h_grid: &[f64]) -> Result<GridMinimum> {
    if values.len() != h_grid.len() {
        return Err(Error::Data("values and bandwidths are not aligned".into()));
    }
    if h_grid.len() < 5 {
        return Err(Error::Data("need at least five grid points".into()));
    }
    if values.iter().chain(h_grid).any(|v| v.is_nan()) {
        return Err(Error::Data("NaN in risk curve".into()));
    }
    if h_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Data("bandwidth grid must be strictly increasing".into()));
    }
    let mut index = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[index] {
            index = i;
        }
    }
    Ok(GridMinimum { h: h_grid[index], index, at_boundary: index == 0 || index == values.len() - 1 })
}

/// Minimizes a positive function of `h` over a log grid, widening the grid
/// up to three times, then refines by golden-section search on `log h` to
/// 0.5% relative precision.
pub fn minimize_bandwidth(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    for attempt in 0..=3 {
        let grid = log_grid(lo, hi, 121);
        let values: Vec<f64> = grid.iter().map(|&h| f(h)).collect();
        let min = minimize_over_grid(&values, &grid)?;
        if min.at_boundary {
            if attempt == 3 {
                return Err(Error::GridBoundary(attempt));
            }
            lo /= 100.0;
            hi *= 100.0;
            continue;
        }
        let (mut a, mut b) = (grid[min.index - 1].ln(), grid[min.index + 1].ln());
        let g = |t: f64| f(t.exp());
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = b - phi * (b - a);
        let mut d = a + phi * (b - a);
        let (mut fc, mut fd) = (g(c), g(d));
        while b - a > 0.005f64.ln_1p() / 4.0 {
            if fc <= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = g(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = g(d);
            }
        }
        return Ok(((a + b) / 2.0).exp());
    }
    unreachable!()
}

/// Numeric minimizer of [`mise_theory`] with the regime predicted by `alpha`.
pub fn h_opt_theory(n: usize, alpha: f64, c: &TheoryConstants, kernel: &KernelSpec) -> Result<OptimalBandwidth> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain(format!("memory exponent {alpha} outside (0, 1]")));
    }
    let h = minimize_bandwidth(|h| mise_theory(h, n, alpha, c, kernel), 1e-3, 10.0)?;
    Ok(OptimalBandwidth { h, regime: Regime::for_alpha(alpha) })
}

/// Numeric minimizer of [`mise_star_theory`].
pub fn h_opt_star_theory(n: usize, alpha_x: f64, c: &TheoryConstants, kernel: &KernelSpec) -> Result<f64> {
    minimize_bandwidth(|h| mise_star_theory(h, n, alpha_x, c, kernel), 1e-3, 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvDiagnostic {
    pub cv: f64,
    /// `CV(h) - MISE(h) - n^{-1} sum eps_i^2`.
    pub residual: f64,
    /// `n^{-2} sum_{j != j'} eps_j eps_j'`.
    pub cross_term: f64,
    pub mean_eps_sq: f64,
}

/// Compares CV with the theoretical MISE value `mise` using the true errors.
pub fn cv_decomposition_diagnostic<T: Scalar>(
    sample: &RegressionSample<T>,
    kernel: &KernelSpec,
    h: T,
    l: usize,
    weight: RiskWeight,
    mise: f64,
) -> Result<CvDiagnostic> {
    let eps = sample
        .errors()
        .ok_or_else(|| Error::Unsupported("CV diagnostic needs the simulated errors".into()))?;
    let cv = cv_criterion(sample, kernel, h, l, weight)?.value.as_f64();
    let n = eps.len() as f64;
    let (mut sum, mut sq, mut sq_w) = (0.0, 0.0, 0.0);
    for (e, x) in eps.iter().zip(sample.x()) {
        let e = e.as_f64();
        sum += e;
        sq += e * e;
        if weight.admits(x.as_f64()) {
            sq_w += e * e;
        }
    }
    let mean_eps_sq = sq_w / n;
    Ok(CvDiagnostic { cv, residual: cv - mise - mean_eps_sq, cross_term: (sum * sum - sq) / (n * n), mean_eps_sq })
}

/// Risk curves over a bandwidth grid with their minimizers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RiskReport {
    pub h_grid: Vec<f64>,
    pub ase: Vec<f64>,
    pub ise: Vec<f64>,
    pub cv: Vec<f64>,
    pub mise_theory: Vec<f64>,
    pub mise_star_theory: Vec<f64>,
    pub h_ase_min: f64,
    pub h_cv_min: f64,
    pub h_opt_theory: f64,
    /// Set when any minimum sits on the grid boundary.
    pub widen_grid: bool,
    pub cross_term: f64,
    pub mean_eps_sq: f64,
}

impl RiskReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("h,ase,ise,cv,mise_theory,mise_star_theory\n");
        for i in 0..self.h_grid.len() {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                self.h_grid[i], self.ase[i], self.ise[i], self.cv[i], self.mise_theory[i], self.mise_star_theory[i]
            );
        }
        let _ = writeln!(
            s,
            "summary,h_ase_min={},h_cv_min={},h_opt_theory={},widen_grid={},cross_term={},mean_eps_sq={}",
            self.h_ase_min, self.h_cv_min, self.h_opt_theory, self.widen_grid, self.cross_term, self.mean_eps_sq
        );
        s
    }
}
