//! Seeded i.i.d. innovation streams.
//!
//! Every stream is a ChaCha20 keystream addressed by `(seed, stream id)`, so the
//! output depends only on the spec and the requested length. Gaussian variates use
//! the Box–Muller transform (two uniforms in, two normals out, no rejection step).

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAIN_STREAM: u64 = 0;
const PRESAMPLE_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InnovationLaw {
    StandardGaussian,
    /// Uniform on `[-sqrt(3), sqrt(3)]`: mean zero, unit variance.
    CenteredUniform,
}

impl Default for InnovationLaw {
    fn default() -> Self {
        InnovationLaw::StandardGaussian
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InnovationSpec {
    pub law: InnovationLaw,
    pub seed: u64,
}

impl InnovationSpec {
    pub fn gaussian(seed: u64) -> Self {
        Self { law: InnovationLaw::StandardGaussian, seed }
    }

    pub fn uniform(seed: u64) -> Self {
        Self { law: InnovationLaw::CenteredUniform, seed }
    }

    /// Same law, seed derived from this one through [`split_seed`].
    pub fn child(&self, tag: u64) -> Self {
        Self { law: self.law, seed: split_seed(self.seed, &[tag]) }
    }
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed and a path of integer labels.
///
/// `s_0 = splitmix64(master)`, `s_{k+1} = splitmix64(s_k ^ splitmix64(label_k))`.
/// Distinct paths give statistically independent ChaCha keys.
pub fn split_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |s, &label| splitmix64(s ^ splitmix64(label)))
}

struct UniformStream {
    rng: ChaCha20Rng,
}

impl UniformStream {
    fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    /// Uniform on the open interval (0, 1) with 53 bits of resolution.
    #[inline]
    fn next_open01(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

fn fill_stream(law: InnovationLaw, seed: u64, stream: u64, n: usize) -> Vec<f64> {
    let mut src = UniformStream::new(seed, stream);
    let mut out = Vec::with_capacity(n + 1);
    match law {
        InnovationLaw::StandardGaussian => {
            while out.len() < n {
                let u1 = src.next_open01();
                let u2 = src.next_open01();
                let r = (-2.0 * u1.ln()).sqrt();
                let theta = std::f64::consts::TAU * u2;
                out.push(r * theta.cos());
                out.push(r * theta.sin());
            }
            out.truncate(n);
        }
        InnovationLaw::CenteredUniform => {
            let s3 = 3f64.sqrt();
            out.extend((0..n).map(|_| s3 * (2.0 * src.next_open01() - 1.0)));
        }
    }
    out
}

fn convert<T: Scalar>(v: Vec<f64>) -> Vec<T> {
    v.into_iter().map(T::lit).collect()
}

/// Draws `n` innovations for times `0..n`.
pub fn draw_innovations<T: Scalar>(spec: &InnovationSpec, n: usize) -> Result<Vec<T>> {
    if n == 0 {
        return Err(Error::EmptyRequest("innovation count must be positive"));
    }
    Ok(convert(fill_stream(spec.law, spec.seed, MAIN_STREAM, n)))
}

/// Draws `n` pre-sample innovations; element `j` is the value at time `-(j + 1)`.
///
/// Pre-sample values come from their own stream, so extending the burn-in never
/// shifts the innovations attached to the retained times.
pub fn draw_presample<T: Scalar>(spec: &InnovationSpec, n: usize) -> Vec<T> {
    convert(fill_stream(spec.law, spec.seed, PRESAMPLE_STREAM, n))
}

/// Innovations for times `-pre..n` in chronological order (length `pre + n`).
pub fn draw_aligned<T: Scalar>(spec: &InnovationSpec, n: usize, pre: usize) -> Result<Vec<T>> {
    let main = draw_innovations::<T>(spec, n)?;
    let mut out = draw_presample::<T>(spec, pre);
    out.reverse();
    out.extend(main);
    Ok(out)
}
