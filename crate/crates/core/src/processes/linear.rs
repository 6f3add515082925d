use super::coefficients::CoefficientSequence;
use crate::error::{config, Error, Result};
use crate::filter::causal_filter;
use crate::innovations::{draw_aligned, InnovationSpec};
use crate::scalar::Scalar;

/// Split of a linear process into the part known at time `i - 1` and the
/// fresh innovation term.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearDecomposition<T> {
    pub eps: Vec<T>,
    /// `E[eps_i | past] = sum_{k>=1} c_k eta_{i-k}`.
    pub eps_pred: Vec<T>,
    /// `c_0 eta_i`.
    pub innov_part: Vec<T>,
}

pub(crate) fn check_lengths(n: usize, lags: usize, burn_in: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyRequest("sample length must be positive"));
    }
    if burn_in < lags {
        return Err(config(format!("burn-in {burn_in} is shorter than truncation {lags}")));
    }
    Ok(())
}

/// Filters aligned innovations (times `-pre..n`, oldest first) through the
/// coefficients and returns the last `n` outputs.
pub fn apply_linear<T: Scalar>(coeffs: &CoefficientSequence<T>, aligned: &[T], n: usize) -> Result<Vec<T>> {
    if n == 0 {
        return Err(Error::EmptyRequest("sample length must be positive"));
    }
    if aligned.len() < n + coeffs.truncation() {
        return Err(config(format!(
            "{} innovations cannot feed {} outputs with {} lags",
            aligned.len(),
            n,
            coeffs.truncation()
        )));
    }
    Ok(causal_filter(coeffs.values(), aligned, n))
}

/// `eps_i = sum_{k=0}^{K} c_k eta_{i-k}`, `i = 0..n`.
///
/// Innovations before time zero come from the pre-sample stream, so the
/// output depends on `burn_in` only through the validity check.
pub fn simulate_linear<T: Scalar>(
    coeffs: &CoefficientSequence<T>,
    innovations: &InnovationSpec,
    n: usize,
    burn_in: usize,
) -> Result<Vec<T>> {
    let k = coeffs.truncation();
    check_lengths(n, k, burn_in)?;
    let eta = draw_aligned(innovations, n, k)?;
    apply_linear(coeffs, &eta, n)
}

pub fn conditional_mean_decomposition<T: Scalar>(
    coeffs: &CoefficientSequence<T>,
    innovations: &InnovationSpec,
    n: usize,
    burn_in: usize,
) -> Result<LinearDecomposition<T>> {
    let k = coeffs.truncation();
    check_lengths(n, k, burn_in)?;
    let eta = draw_aligned(innovations, n, k)?;
    Ok(decompose_aligned(coeffs, &eta, n))
}

pub(crate) fn decompose_aligned<T: Scalar>(coeffs: &CoefficientSequence<T>, eta: &[T], n: usize) -> LinearDecomposition<T> {
    let c0 = coeffs.leading();
    let eps_pred = causal_filter(&coeffs.predictable_part(), eta, n);
    let innov_part: Vec<T> = eta[eta.len() - n..].iter().map(|&e| c0 * e).collect();
    let eps = eps_pred.iter().zip(&innov_part).map(|(&p, &q)| p + q).collect();
    LinearDecomposition { eps, eps_pred, innov_part }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::processes::coefficients::{farima_coeffs, linear_lrd_coeffs};

    #[test]
    fn constant_innovations_through_two_taps() {
        let c = CoefficientSequence::new(vec![1.0f64, 1.0], 1.0).unwrap();
        let out = apply_linear(&c, &[1.0; 6], 5).unwrap();
        assert_eq!(out, vec![2.0; 5]);
    }

    #[test]
    fn zero_length_and_short_burn_in_rejected() {
        let c = farima_coeffs(0.2f64, 100).unwrap();
        let spec = InnovationSpec::gaussian(1);
        assert!(matches!(simulate_linear(&c, &spec, 0, 100), Err(Error::EmptyRequest(_))));
        assert!(matches!(simulate_linear(&c, &spec, 10, 99), Err(Error::Config(_))));
    }

    #[test]
    fn decomposition_adds_up_exactly() {
        let c = linear_lrd_coeffs(0.5f64, 300).unwrap();
        let spec = InnovationSpec::gaussian(7);
        let dec = conditional_mean_decomposition(&c, &spec, 400, 300).unwrap();
        let eps = simulate_linear(&c, &spec, 400, 300).unwrap();
        for i in 0..400 {
            assert!((dec.eps[i] - eps[i]).abs() < 1e-12);
            assert!((dec.eps_pred[i] + dec.innov_part[i] - eps[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn burn_in_does_not_move_output() {
        let c = farima_coeffs(0.3f64, 200).unwrap();
        let spec = InnovationSpec::gaussian(3);
        let a = simulate_linear::<f64>(&c, &spec, 100, 200).unwrap();
        let b = simulate_linear::<f64>(&c, &spec, 100, 2000).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn prefix_stable_in_n() {
        let c = farima_coeffs(0.3f64, 200).unwrap();
        let spec = InnovationSpec::gaussian(3);
        let a = simulate_linear::<f64>(&c, &spec, 100, 200).unwrap();
        let b = simulate_linear::<f64>(&c, &spec, 300, 200).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}
