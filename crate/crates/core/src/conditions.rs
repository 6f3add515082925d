//! Trend diagnostics for the bandwidth and negligibility conditions of the
//! central limit theory.
//!
//! Bandwidth conditions are powers of `n` once `h = c n^{-beta}`, so their
//! verdicts come from exact exponent arithmetic. Conditions involving the
//! error process are checked by Monte Carlo log-log slopes.

use std::fmt::{self, Display, Write as _};

use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::innovations::split_seed;
use crate::processes::ProcessSpec;
use crate::scaling::log_log_fit;

/// Slope tolerance for Monte Carlo verdicts.
pub const SLOPE_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConditionId {
    A,
    B1,
    B2,
    C1,
    C2,
    C6,
    VarOn,
}

impl Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConditionId::A => "A",
            ConditionId::B1 => "B1",
            ConditionId::B2 => "B2",
            ConditionId::C1 => "C1",
            ConditionId::C2 => "C2",
            ConditionId::C6 => "C6",
            ConditionId::VarOn => "varO(n)",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    TendsToZero,
    Bounded,
    Diverges,
}

impl Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::TendsToZero => "tends-to-zero",
            Verdict::Bounded => "bounded",
            Verdict::Diverges => "diverges",
        })
    }
}

/// Exponent arithmetic type: `f64` for fitted slopes, `Ratio<i64>` for exact
/// analytic verdicts.
pub trait Exponent: Copy + PartialOrd + Signed + ToPrimitive + Display {}
impl<E: Copy + PartialOrd + Signed + ToPrimitive + Display> Exponent for E {}

/// Verdict for a statistic growing like `n^exponent`.
pub fn verdict_from_exponent<E: Exponent>(exponent: E, tolerance: E) -> Verdict {
    if exponent < -tolerance {
        Verdict::TendsToZero
    } else if exponent > tolerance {
        Verdict::Diverges
    } else {
        Verdict::Bounded
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionVerdict<E> {
    pub id: ConditionId,
    pub n_values: Vec<usize>,
    pub statistic: Vec<f64>,
    pub exponent: E,
    pub verdict: Verdict,
    pub tolerance: E,
}

/// `h(n) = c n^{-beta}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandwidthRule<E> {
    pub c: f64,
    pub beta: E,
}

impl<E: Exponent> BandwidthRule<E> {
    pub fn new(c: f64, beta: E) -> Self {
        Self { c, beta }
    }

    pub fn at(&self, n: usize) -> f64 {
        self.c * (n as f64).powf(-self.beta.to_f64().expect("finite exponent"))
    }
}

/// Exact trend verdicts for
/// `B1: h n^{1-alpha}`, `B2: h^5 n^{1-alpha}`, `C1: h^5 n^{1-alpha_X}`,
/// `C2: h n^{1-alpha_X}` and `C6: h n^{1-alpha-alpha_X}`.
pub fn check_bandwidth_conditions<E: Exponent>(
    alpha: E,
    alpha_x: E,
    rule: &BandwidthRule<E>,
    ladder: &[usize],
) -> Vec<ConditionVerdict<E>> {
    let one = E::one();
    let five = one + one + one + one + one;
    let b = rule.beta;
    let items = [
        (ConditionId::B1, 1, one - alpha - b),
        (ConditionId::B2, 5, one - alpha - five * b),
        (ConditionId::C1, 5, one - alpha_x - five * b),
        (ConditionId::C2, 1, one - alpha_x - b),
        (ConditionId::C6, 1, one - alpha - alpha_x - b),
    ];
    items
        .into_iter()
        .map(|(id, power, exponent)| {
            let e = exponent.to_f64().expect("finite exponent");
            let statistic = ladder.iter().map(|&n| rule.c.powi(power) * (n as f64).powf(e)).collect();
            ConditionVerdict {
                id,
                n_values: ladder.to_vec(),
                statistic,
                exponent,
                verdict: verdict_from_exponent(exponent, E::zero()),
                tolerance: E::zero(),
            }
        })
        .collect()
}

/// Exact slope of the condition-(A) statistic for linear errors, where the
/// partial sum is `-sum eta_i` and the statistic behaves like `sqrt(h)`.
pub fn linear_negligibility_exponent<E: Exponent>(rule: &BandwidthRule<E>) -> E {
    -rule.beta / (E::one() + E::one())
}

/// Partial sums `sum_{i<n} (E[eps_i | past] - eps_i)` over an `n` ladder, one
/// row per replicate. Each replicate is simulated once at the largest `n`, and
/// every condition statistic is computed from the same rows.
#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleSums {
    pub ladder: Vec<usize>,
    pub sums: Vec<Vec<f64>>,
}

impl MartingaleSums {
    /// Replicate `r` runs with seed `split_seed(seed, [r])`.
    pub fn simulate(spec: &ProcessSpec, ladder: &[usize], reps: usize, seed: u64) -> Result<Self> {
        if ladder.is_empty() || reps < 2 {
            return Err(Error::EmptyRequest("condition checks need a ladder and at least two replicates"));
        }
        let n_max = *ladder.iter().max().expect("non-empty ladder");
        let prepared = spec.clone().prepared(n_max)?;
        let sums = (0..reps)
            .map(|r| {
                let run = prepared.clone().with_seed(split_seed(seed, &[r as u64]));
                let path = run.simulate_path::<f64>(n_max)?;
                let cond = path.cond_mean.ok_or_else(|| {
                    Error::Unsupported(format!("no closed-form conditional mean for the {} family", spec.family.name()))
                })?;
                let mut out = Vec::with_capacity(ladder.len());
                for &n in ladder {
                    out.push((0..n).map(|i| cond[i] - path.eps[i]).sum());
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { ladder: ladder.to_vec(), sums })
    }

    fn reps(&self) -> f64 {
        self.sums.len() as f64
    }

    /// `sqrt(nh)/n |sum (E[eps_i | past] - eps_i)|` averaged over replicates.
    pub fn negligibility_a(&self, rule: &BandwidthRule<f64>) -> Result<ConditionVerdict<f64>> {
        let statistic = self
            .ladder
            .iter()
            .enumerate()
            .map(|(j, &n)| {
                let scale = (n as f64 * rule.at(n)).sqrt() / n as f64;
                self.sums.iter().map(|row| scale * row[j].abs()).sum::<f64>() / self.reps()
            })
            .collect();
        fitted(ConditionId::A, &self.ladder, statistic, |s| verdict_from_exponent(s, SLOPE_TOLERANCE))
    }

    /// Sample variance of the partial sums; bounded when the fitted exponent
    /// is at most `1 + 0.1`.
    pub fn var_linear_growth(&self) -> Result<ConditionVerdict<f64>> {
        let statistic = (0..self.ladder.len())
            .map(|j| {
                let m = self.sums.iter().map(|row| row[j]).sum::<f64>() / self.reps();
                self.sums.iter().map(|row| (row[j] - m).powi(2)).sum::<f64>() / (self.reps() - 1.0)
            })
            .collect();
        fitted(ConditionId::VarOn, &self.ladder, statistic, |s| {
            if s <= 1.0 + SLOPE_TOLERANCE {
                Verdict::Bounded
            } else {
                Verdict::Diverges
            }
        })
    }
}

fn fitted(id: ConditionId, ladder: &[usize], statistic: Vec<f64>, slope_to_verdict: impl Fn(f64) -> Verdict) -> Result<ConditionVerdict<f64>> {
    let x: Vec<f64> = ladder.iter().map(|&n| n as f64).collect();
    let fit = log_log_fit(&x, &statistic).ok_or_else(|| Error::Data(format!("cannot fit a slope for {id}")))?;
    Ok(ConditionVerdict {
        id,
        n_values: ladder.to_vec(),
        statistic,
        exponent: fit.slope,
        verdict: slope_to_verdict(fit.slope),
        tolerance: SLOPE_TOLERANCE,
    })
}

/// Monte Carlo check of `sqrt(nh)/n |sum (E[eps_i | past] - eps_i)| -> 0`,
/// averaging the statistic over `reps` seeds at each `n`.
pub fn check_negligibility_a(
    spec: &ProcessSpec,
    ladder: &[usize],
    rule: &BandwidthRule<f64>,
    reps: usize,
    seed: u64,
) -> Result<ConditionVerdict<f64>> {
    MartingaleSums::simulate(spec, ladder, reps, seed)?.negligibility_a(rule)
}

/// Monte Carlo check of `Var(sum (E[eps_i | past] - eps_i)) = O(n)`.
pub fn check_var_linear_growth(spec: &ProcessSpec, ladder: &[usize], reps: usize, seed: u64) -> Result<ConditionVerdict<f64>> {
    MartingaleSums::simulate(spec, ladder, reps, seed)?.var_linear_growth()
}

/// CSV rows `condition,n,statistic,exponent,verdict`.
pub fn verdicts_to_csv<E: Display>(verdicts: &[ConditionVerdict<E>]) -> String {
    let mut s = String::from("condition,n,statistic,exponent,verdict\n");
    for v in verdicts {
        for (n, stat) in v.n_values.iter().zip(&v.statistic) {
            let _ = writeln!(s, "{},{},{},{},{}", v.id, n, stat, v.exponent, v.verdict);
        }
    }
    s
}
