//! Conditionally heteroscedastic error models: linear filters over GARCH
//! innovations, stochastic volatility and LARCH.

use serde::{Deserialize, Serialize};

use super::coefficients::{farima_coeffs, CoefficientSequence};
use super::linear::{apply_linear, check_lengths};
use crate::error::{domain, Error, Result};
use crate::filter::causal_filter;
use crate::innovations::{draw_aligned, draw_innovations, InnovationSpec};
use crate::scalar::Scalar;

/// `sigma_t^2 = a0 + sum_j arch_j eta_{t-j}^2 + sum_j garch_j sigma_{t-j}^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GarchParams {
    pub a0: f64,
    #[serde(default)]
    pub arch: Vec<f64>,
    #[serde(default)]
    pub garch: Vec<f64>,
}

impl GarchParams {
    pub fn new(a0: f64, arch: Vec<f64>, garch: Vec<f64>) -> Self {
        Self { a0, arch, garch }
    }

    pub fn persistence(&self) -> f64 {
        self.arch.iter().sum::<f64>() + self.garch.iter().sum::<f64>()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a0 > 0.0 && self.a0.is_finite()) {
            return Err(domain("GARCH intercept must be positive"));
        }
        if self.arch.iter().chain(&self.garch).any(|&v| !(v >= 0.0 && v.is_finite())) {
            return Err(domain("GARCH coefficients must be non-negative"));
        }
        if self.persistence() >= 1.0 {
            return Err(Error::Stationarity(format!(
                "GARCH persistence {} is not below one",
                self.persistence()
            )));
        }
        Ok(())
    }

    pub fn stationary_variance(&self) -> f64 {
        self.a0 / (1.0 - self.persistence())
    }
}

/// GARCH innovations for times `-pre..n` (oldest first), started `warm_up`
/// steps earlier from the stationary variance. Driving noise comes from `z`.
pub fn garch_innovations<T: Scalar>(
    params: &GarchParams,
    z: &InnovationSpec,
    n: usize,
    pre: usize,
    warm_up: usize,
) -> Result<Vec<T>> {
    params.validate()?;
    let zs = draw_aligned::<f64>(z, n, pre + warm_up)?;
    let (p, q) = (params.arch.len(), params.garch.len());
    let s0 = params.stationary_variance();
    let mut eta2 = vec![s0; p];
    let mut sig2 = vec![s0; q];
    let mut out = Vec::with_capacity(pre + n);
    for (t, &zt) in zs.iter().enumerate() {
        let mut s = params.a0;
        for j in 0..p {
            s += params.arch[j] * eta2[(t + p - 1 - j) % p];
        }
        for j in 0..q {
            s += params.garch[j] * sig2[(t + q - 1 - j) % q];
        }
        let eta = s.sqrt() * zt;
        if p > 0 {
            eta2[t % p] = eta * eta;
        }
        if q > 0 {
            sig2[t % q] = s;
        }
        if t >= warm_up {
            out.push(T::lit(eta));
        }
    }
    Ok(out)
}

/// Linear filter applied to GARCH innovations. Returns the errors and the
/// conditional means `sum_{k>=1} c_k eta_{i-k}`.
pub(crate) fn filtered_garch<T: Scalar>(
    coeffs: &CoefficientSequence<T>,
    params: &GarchParams,
    z: &InnovationSpec,
    n: usize,
    burn_in: usize,
) -> Result<(Vec<T>, Vec<T>)> {
    let k = coeffs.truncation();
    check_lengths(n, k, burn_in)?;
    let eta = garch_innovations::<T>(params, z, n, k, burn_in)?;
    let eps = apply_linear(coeffs, &eta, n)?;
    let pred = causal_filter(&coeffs.predictable_part(), &eta, n);
    Ok((eps, pred))
}

/// FARIMA(0, d, 0) filter (`psi_0 = 1`) driven by GARCH innovations.
pub fn simulate_farima_garch<T: Scalar>(
    d: T,
    params: &GarchParams,
    z: &InnovationSpec,
    n: usize,
    truncation: usize,
    burn_in: usize,
) -> Result<Vec<T>> {
    let coeffs = farima_coeffs(d, truncation)?;
    Ok(filtered_garch(&coeffs, params, z, n, burn_in)?.0)
}

/// Errors together with the volatility path that scaled them.
#[derive(Debug, Clone, PartialEq)]
pub struct VolatilityPath<T> {
    pub eps: Vec<T>,
    pub volatility: Vec<T>,
}

/// Stream tag of the multiplicative noise `Z`, kept apart from the LRD driver.
pub const SV_NOISE_TAG: u64 = 0x5A;

/// `eps_i = Z_i R_i` with `R_i = level + sum_{k>=1} c_k eta_{i-k}`.
///
/// The sign of `R_i` is irrelevant for the error law, so no positivity is imposed.
pub fn simulate_stochastic_volatility<T: Scalar>(
    coeffs: &CoefficientSequence<T>,
    level: T,
    innovations: &InnovationSpec,
    n: usize,
    burn_in: usize,
) -> Result<VolatilityPath<T>> {
    let k = coeffs.truncation();
    check_lengths(n, k, burn_in)?;
    let eta = draw_aligned::<T>(innovations, n, k)?;
    let z = draw_innovations::<T>(&innovations.child(SV_NOISE_TAG), n)?;
    stochastic_volatility_from(coeffs, level, &eta, &z)
}

/// Deterministic core of the stochastic-volatility model: `eta` holds times
/// `-K..n`, `z` holds times `0..n`.
pub fn stochastic_volatility_from<T: Scalar>(
    coeffs: &CoefficientSequence<T>,
    level: T,
    eta: &[T],
    z: &[T],
) -> Result<VolatilityPath<T>> {
    if !(level > T::zero()) {
        return Err(domain("volatility level must be positive"));
    }
    let n = z.len();
    if n == 0 {
        return Err(Error::EmptyRequest("sample length must be positive"));
    }
    if eta.len() < n + coeffs.truncation() {
        return Err(domain("too few LRD innovations for the volatility filter"));
    }
    let volatility: Vec<T> = causal_filter(&coeffs.predictable_part(), eta, n)
        .into_iter()
        .map(|r| r + level)
        .collect();
    let eps = volatility.iter().zip(z).map(|(&r, &zz)| r * zz).collect();
    Ok(VolatilityPath { eps, volatility })
}

/// LARCH weights `b_k ∝ k^{-(alpha+1)/2}`, `k = 1..=K`, scaled so that
/// `sum b_k^2 = square_sum`. Index 0 holds zero.
pub fn larch_coeffs<T: Scalar>(alpha: T, k: usize, square_sum: T) -> Result<Vec<T>> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(domain(format!("memory exponent {alpha} outside (0, 1)")));
    }
    if k == 0 {
        return Err(domain("LARCH needs at least one lag"));
    }
    if !(square_sum > T::zero()) {
        return Err(domain("LARCH weight energy must be positive"));
    }
    let expo = -(alpha + T::one()) / T::lit(2.0);
    let mut b: Vec<T> = std::iter::once(T::zero())
        .chain((1..=k).map(|j| T::from_usize_lossy(j).powf(expo)))
        .collect();
    let s: T = b.iter().map(|&v| v * v).sum();
    let f = (square_sum / s).sqrt();
    b.iter_mut().for_each(|v| *v = *v * f);
    Ok(b)
}

/// `eps*_t = Z_t R_t`, `R_t = level + sum_{k=1}^{K} b_k eps*_{t-k}`.
///
/// The recursion starts `burn_in` steps before time zero from a zero history.
/// `b[0]` is ignored.
pub fn simulate_larch<T: Scalar>(
    b: &[T],
    level: T,
    z: &InnovationSpec,
    n: usize,
    burn_in: usize,
) -> Result<VolatilityPath<T>> {
    if n == 0 {
        return Err(Error::EmptyRequest("sample length must be positive"));
    }
    if !(level > T::zero()) {
        return Err(domain("LARCH level must be positive"));
    }
    let energy: T = b.iter().skip(1).map(|&v| v * v).sum();
    if !(energy < T::one()) {
        return Err(Error::Stationarity(format!(
            "LARCH weight energy {energy} is not below one"
        )));
    }
    let zs = draw_aligned::<T>(z, n, burn_in)?;
    let lags = b.len().saturating_sub(1);
    let mut hist: Vec<T> = Vec::with_capacity(zs.len());
    let mut eps = Vec::with_capacity(n);
    let mut volatility = Vec::with_capacity(n);
    for (t, &zt) in zs.iter().enumerate() {
        let reach = lags.min(t);
        let mut r = level;
        for k in 1..=reach {
            r = r + b[k] * hist[t - k];
        }
        let e = zt * r;
        hist.push(e);
        if t >= burn_in {
            eps.push(e);
            volatility.push(r);
        }
    }
    Ok(VolatilityPath { eps, volatility })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::processes::linear::simulate_linear;

    #[test]
    fn degenerate_garch_is_plain_farima() {
        let spec = InnovationSpec::gaussian(11);
        let g = GarchParams::new(1.0, vec![], vec![]);
        let a = simulate_farima_garch(0.3f64, &g, &spec, 200, 300, 300).unwrap();
        let b = simulate_linear(&farima_coeffs(0.3f64, 300).unwrap(), &spec, 200, 300).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn garch_stationarity_enforced() {
        let spec = InnovationSpec::gaussian(1);
        let g = GarchParams::new(0.1, vec![0.5], vec![0.5]);
        let r = simulate_farima_garch(0.3f64, &g, &spec, 10, 10, 10);
        assert!(matches!(r, Err(Error::Stationarity(_))));
        assert!(GarchParams::new(0.0, vec![], vec![]).validate().is_err());
    }

    #[test]
    fn garch_marginal_variance() {
        let g = GarchParams::new(0.1, vec![0.1], vec![0.8]);
        let eta = garch_innovations::<f64>(&g, &InnovationSpec::gaussian(5), 200_000, 0, 1000).unwrap();
        let v = eta.iter().map(|e| e * e).sum::<f64>() / eta.len() as f64;
        assert!((v - 1.0).abs() < 0.05, "variance {v}");
    }

    #[test]
    fn sv_with_zero_noise_is_zero() {
        let c = crate::processes::coefficients::linear_lrd_coeffs(0.5f64, 50).unwrap();
        let eta = vec![1.0; 150];
        let p = stochastic_volatility_from(&c, 1.0, &eta, &[0.0; 100]).unwrap();
        assert!(p.eps.iter().all(|&e| e == 0.0));
        assert!(stochastic_volatility_from(&c, 0.0, &eta, &[0.0; 100]).is_err());
    }

    #[test]
    fn sv_errors_uncorrelated_but_volatility_persistent() {
        let c = crate::processes::coefficients::linear_lrd_coeffs(0.4f64, 2000).unwrap();
        let p = simulate_stochastic_volatility(&c, 1.0, &InnovationSpec::gaussian(9), 20_000, 2000).unwrap();
        let n = p.eps.len() as f64;
        let lag1: f64 = p.eps.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / n;
        let var: f64 = p.eps.iter().map(|e| e * e).sum::<f64>() / n;
        assert!((lag1 / var).abs() < 4.0 / n.sqrt());
    }

    #[test]
    fn larch_energy_guard() {
        let b = larch_coeffs(0.5f64, 10, 1.0).unwrap();
        let r = simulate_larch(&b, 1.0, &InnovationSpec::gaussian(1), 10, 10);
        assert!(matches!(r, Err(Error::Stationarity(_))));
    }

    #[test]
    fn larch_burn_in_forgets_start() {
        let b = larch_coeffs(0.5f64, 100, 0.5).unwrap();
        let spec = InnovationSpec::gaussian(4);
        let a = simulate_larch(&b, 1.0, &spec, 200, 5_000).unwrap();
        let c = simulate_larch(&b, 1.0, &spec, 200, 10_000).unwrap();
        let diff = a.eps.iter().zip(&c.eps).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-6, "max diff {diff}");
    }
}
