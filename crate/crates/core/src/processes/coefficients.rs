use crate::error::{domain, Error, Result};
use crate::filter::autocovariances;
use crate::scalar::Scalar;

/// MA(∞) weights `c_0..=c_K` of a linear process together with the memory
/// exponent they were built for.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSequence<T> {
    values: Vec<T>,
    claimed_alpha: T,
}

impl<T: Scalar> CoefficientSequence<T> {
    pub fn new(values: Vec<T>, claimed_alpha: T) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyRequest("coefficient sequence needs at least c_0"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(domain("non-finite MA coefficient"));
        }
        if values[0] <= T::zero() {
            return Err(domain("leading MA coefficient must be positive"));
        }
        Ok(Self { values, claimed_alpha })
    }

    /// The white-noise filter `[1]`.
    pub fn iid() -> Self {
        Self { values: vec![T::one()], claimed_alpha: T::one() }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn leading(&self) -> T {
        self.values[0]
    }

    /// Number of retained lags `K` (the sequence holds `K + 1` values).
    pub fn truncation(&self) -> usize {
        self.values.len() - 1
    }

    pub fn claimed_alpha(&self) -> T {
        self.claimed_alpha
    }

    pub fn square_sum(&self) -> T {
        self.values.iter().map(|&c| c * c).sum()
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self {
            values: self.values.iter().map(|&c| c * factor).collect(),
            claimed_alpha: self.claimed_alpha,
        }
    }

    /// Rescaled so that `sum c_k^2 = 1`.
    pub fn normalized(&self) -> Self {
        self.scaled(T::one() / self.square_sum().sqrt())
    }

    /// Weights of the predictable part: `c_0` replaced by zero.
    pub fn predictable_part(&self) -> Vec<T> {
        let mut v = self.values.clone();
        v[0] = T::zero();
        v
    }

    pub fn autocovariances(&self, max_lag: usize) -> Vec<T> {
        autocovariances(&self.values, max_lag)
    }

    /// Relative spread `(max - min) / max` of `c_k * k^{(alpha+1)/2}` over the last
    /// third of the lags. Small values mean the tail follows the claimed power law.
    pub fn tail_drift(&self) -> T {
        let k_max = self.truncation();
        if k_max < 3 {
            return T::zero();
        }
        let expo = (self.claimed_alpha + T::one()) / T::lit(2.0);
        let start = (2 * k_max / 3).max(1);
        let (lo, hi) = (start..=k_max)
            .map(|k| (self.values[k] * T::from_usize_lossy(k).powf(expo)).abs())
            .fold((T::infinity(), T::zero()), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if hi == T::zero() {
            T::zero()
        } else {
            (hi - lo) / hi
        }
    }
}

/// `c_0 = 1`, `c_k = scale * k^{-(alpha+1)/2}`, not normalized.
pub fn power_law_coeffs<T: Scalar>(alpha: T, k: usize, scale: T) -> Result<CoefficientSequence<T>> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(domain(format!("memory exponent {alpha} outside (0, 1)")));
    }
    if k < 2 {
        return Err(domain("power-law coefficients need at least two lags"));
    }
    let expo = -(alpha + T::one()) / T::lit(2.0);
    let values = std::iter::once(T::one())
        .chain((1..=k).map(|j| scale * T::from_usize_lossy(j).powf(expo)))
        .collect();
    CoefficientSequence::new(values, alpha)
}

/// Power-law MA weights `k^{-(alpha+1)/2}` (with `c_0 = 1` before scaling),
/// normalized to unit marginal variance.
pub fn linear_lrd_coeffs<T: Scalar>(alpha: T, k: usize) -> Result<CoefficientSequence<T>> {
    Ok(power_law_coeffs(alpha, k, T::one())?.normalized())
}

/// Weights of `(1 - B)^{-d}`: `psi_0 = 1`, `psi_k = psi_{k-1} (k - 1 + d) / k`.
///
/// `d = 0` yields the white-noise filter; `d < 0` gives antipersistent weights.
pub fn farima_coeffs<T: Scalar>(d: T, k: usize) -> Result<CoefficientSequence<T>> {
    let half = T::lit(0.5);
    if !(d.abs() < half) {
        return Err(domain(format!("fractional parameter {d} outside (-1/2, 1/2)")));
    }
    let alpha = T::one() - d - d;
    if d == T::zero() {
        let mut values = vec![T::zero(); k + 1];
        values[0] = T::one();
        return CoefficientSequence::new(values, alpha);
    }
    let mut values = Vec::with_capacity(k + 1);
    let mut psi = T::one();
    values.push(psi);
    for j in 1..=k {
        let jf = T::from_usize_lossy(j);
        psi = psi * (jf - T::one() + d) / jf;
        values.push(psi);
    }
    CoefficientSequence::new(values, alpha)
}

/// Exact `Var(sum_{i=1}^n eps_i)` for the truncated linear process with unit
/// innovation variance: `n gamma(0) + 2 sum_{k=1}^{n-1} (n - k) gamma(k)`.
pub fn partial_sum_variance_oracle<T: Scalar>(coeffs: &CoefficientSequence<T>, n: usize) -> T {
    if n == 0 {
        return T::zero();
    }
    let gamma = coeffs.autocovariances(n - 1);
    let nf = T::from_usize_lossy(n);
    let cross: T = gamma
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &g)| (nf - T::from_usize_lossy(k)) * g)
        .sum();
    nf * gamma[0] + T::lit(2.0) * cross
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn oracle_hand_values() {
        let iid = CoefficientSequence::<f64>::iid();
        assert_eq!(partial_sum_variance_oracle(&iid, 10), 10.0);
        let two = CoefficientSequence::new(vec![1.0, 1.0], 1.0).unwrap();
        assert_eq!(partial_sum_variance_oracle(&two, 2), 6.0);
    }

    #[test]
    fn farima_recursion_first_steps() {
        let c = farima_coeffs(0.3f64, 10).unwrap();
        assert_relative_eq!(c.values()[1], 0.3, epsilon = 1e-12);
        assert_relative_eq!(c.values()[2], 0.195, epsilon = 1e-12);
        assert_relative_eq!(c.claimed_alpha(), 0.4, epsilon = 1e-12);
        let z = farima_coeffs(0.0f64, 5).unwrap();
        assert_eq!(z.values(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn farima_antipersistent_signs() {
        let c = farima_coeffs(-0.3f64, 50).unwrap();
        assert!(c.values()[1..].iter().all(|&v| v < 0.0));
        assert!(farima_coeffs(0.5f64, 5).is_err());
        assert!(farima_coeffs(-0.5f64, 5).is_err());
    }

    #[test]
    fn farima_tail_matches_power_law_rate() {
        let c = farima_coeffs(0.3f64, 10_000).unwrap();
        assert!(c.tail_drift() < 0.05, "drift {}", c.tail_drift());
    }

    #[test]
    fn linear_lrd_normalized_and_power_law_tail() {
        let c = linear_lrd_coeffs(0.5f64, 10_000).unwrap();
        assert_relative_eq!(c.square_sum(), 1.0, epsilon = 1e-12);
        assert!(c.tail_drift() < 0.05);
        assert!(c.tail_drift() < 1e-12, "pure power law has no drift");
        assert!(linear_lrd_coeffs(1.0f64, 10).is_err());
        assert!(linear_lrd_coeffs(0.0f64, 10).is_err());
        assert!(linear_lrd_coeffs(0.5f64, 1).is_err());
    }

    #[test]
    fn invalid_sequences_rejected() {
        assert!(CoefficientSequence::<f64>::new(vec![], 1.0).is_err());
        assert!(CoefficientSequence::new(vec![0.0, 1.0], 1.0).is_err());
        assert!(CoefficientSequence::new(vec![1.0, f64::NAN], 1.0).is_err());
    }

    #[test]
    fn oracle_works_in_f32() {
        let c = linear_lrd_coeffs(0.4f32, 200).unwrap();
        let v32 = partial_sum_variance_oracle(&c, 64);
        let c64 = linear_lrd_coeffs(0.4f64, 200).unwrap();
        let v64 = partial_sum_variance_oracle(&c64, 64);
        assert!(((v32 as f64) - v64).abs() / v64 < 1e-4);
    }
}
