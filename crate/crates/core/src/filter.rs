//! Moving-average filtering and autocovariances of coefficient sequences.
//!
//! Short filters are evaluated as direct sums; long ones through a zero-padded
//! FFT. The FFT path only touches outputs whose whole window lies inside the
//! input, so circular wrap-around never reaches a returned value.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Scalar;

fn fft_cost(len: usize) -> usize {
    let n = len.next_power_of_two();
    n * (n.trailing_zeros() as usize + 1)
}

fn prefer_fft(direct_ops: usize, fft_len: usize, transforms: usize) -> bool {
    direct_ops > 8 * transforms * fft_cost(fft_len)
}

/// Applies `coeffs` causally: `out[i] = sum_k coeffs[k] * input[off + i - k]` with
/// `off = input.len() - n`.
///
/// # Panics
/// If `off < coeffs.len() - 1` (the window would leave the input) or `n > input.len()`.
pub fn causal_filter<T: Scalar>(coeffs: &[T], input: &[T], n: usize) -> Vec<T> {
    assert!(!coeffs.is_empty(), "empty filter");
    assert!(n <= input.len(), "output longer than input");
    let off = input.len() - n;
    assert!(off + 1 >= coeffs.len(), "input lacks a full pre-sample window");
    if prefer_fft(n * coeffs.len(), input.len(), 3) {
        MaFilterBank::new(&[coeffs], input.len()).apply(input, n).pop().unwrap()
    } else {
        direct(coeffs, input, n)
    }
}

fn direct<T: Scalar>(coeffs: &[T], input: &[T], n: usize) -> Vec<T> {
    let off = input.len() - n;
    (0..n)
        .map(|i| {
            let t = off + i;
            coeffs
                .iter()
                .enumerate()
                .fold(T::zero(), |acc, (k, &c)| acc + c * input[t - k])
        })
        .collect()
}

/// Several MA filters sharing one input length: the input is transformed once and
/// every coefficient spectrum is applied to it.
pub struct MaFilterBank<T: Scalar> {
    input_len: usize,
    n_fft: usize,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
    spectra: Vec<Vec<Complex<T>>>,
    max_lag: usize,
}

impl<T: Scalar> MaFilterBank<T> {
    pub fn new(coeff_sets: &[&[T]], input_len: usize) -> Self {
        let max_lag = coeff_sets.iter().map(|c| c.len()).max().unwrap_or(1) - 1;
        assert!(input_len > max_lag, "input shorter than the longest filter");
        let n_fft = input_len.next_power_of_two();
        let mut planner = FftPlanner::<T>::new();
        let fwd = planner.plan_fft_forward(n_fft);
        let inv = planner.plan_fft_inverse(n_fft);
        let spectra = coeff_sets
            .iter()
            .map(|c| {
                let mut buf = vec![Complex::new(T::zero(), T::zero()); n_fft];
                for (b, &v) in buf.iter_mut().zip(c.iter()) {
                    b.re = v;
                }
                fwd.process(&mut buf);
                buf
            })
            .collect();
        Self { input_len, n_fft, fwd, inv, spectra, max_lag }
    }

    pub fn len(&self) -> usize {
        self.spectra.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spectra.is_empty()
    }

    /// Filters `input` (of the length given at construction) with every filter in
    /// the bank and returns the last `n` outputs of each.
    pub fn apply(&self, input: &[T], n: usize) -> Vec<Vec<T>> {
        assert_eq!(input.len(), self.input_len, "input length differs from plan");
        let off = self.input_len - n;
        assert!(off >= self.max_lag, "input lacks a full pre-sample window");
        let mut x = vec![Complex::new(T::zero(), T::zero()); self.n_fft];
        for (b, &v) in x.iter_mut().zip(input) {
            b.re = v;
        }
        self.fwd.process(&mut x);
        let scale = T::one() / T::from_usize_lossy(self.n_fft);
        self.spectra
            .iter()
            .map(|spec| {
                let mut y: Vec<Complex<T>> = x.iter().zip(spec).map(|(a, b)| a * b).collect();
                self.inv.process(&mut y);
                y[off..off + n].iter().map(|c| c.re * scale).collect()
            })
            .collect()
    }
}

/// Autocovariances `gamma(k) = sum_j c_j c_{j+k}` for `k = 0..=max_lag`.
/// Lags beyond the filter length are exactly zero.
pub fn autocovariances<T: Scalar>(coeffs: &[T], max_lag: usize) -> Vec<T> {
    let len = coeffs.len();
    let eff = max_lag.min(len.saturating_sub(1));
    let mut out = if prefer_fft(len * (eff + 1), len + eff, 2) {
        autocov_fft(coeffs, eff)
    } else {
        (0..=eff)
            .map(|k| {
                coeffs[..len - k]
                    .iter()
                    .zip(&coeffs[k..])
                    .fold(T::zero(), |acc, (a, b)| acc + *a * *b)
            })
            .collect()
    };
    out.resize(max_lag + 1, T::zero());
    out
}

fn autocov_fft<T: Scalar>(coeffs: &[T], max_lag: usize) -> Vec<T> {
    let n_fft = (coeffs.len() + max_lag).next_power_of_two();
    let mut planner = FftPlanner::<T>::new();
    let fwd = planner.plan_fft_forward(n_fft);
    let inv = planner.plan_fft_inverse(n_fft);
    let mut buf = vec![Complex::new(T::zero(), T::zero()); n_fft];
    for (b, &v) in buf.iter_mut().zip(coeffs) {
        b.re = v;
    }
    fwd.process(&mut buf);
    for b in buf.iter_mut() {
        *b = Complex::new(b.norm_sqr(), T::zero());
    }
    inv.process(&mut buf);
    let scale = T::one() / T::from_usize_lossy(n_fft);
    buf[..=max_lag].iter().map(|c| c.re * scale).collect()
}
