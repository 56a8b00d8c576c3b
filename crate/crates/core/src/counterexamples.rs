//! Constructive versions of the two examples separating hitting sets,
//! distribution covers and the maximin volumes.
//!
//! Example 1 discretizes "functions equal to one almost everywhere": a
//! single uniform distribution covers the class although no small set of
//! arms hits it once zeros are placed adversarially.
//!
//! Example 2 partitions `[0, 1]` into `3^M` intervals. Given any `N`
//! candidate distributions, it prunes intervals on which some candidate is
//! heavy, keeps `2·3^{M−1}` of the rest as `R` and draws a balanced ±1
//! function on `R` whose correlation with every candidate is at most `1/5`.
//! Rescaled to `{0, ½, 1}` the function escapes the whole candidate set.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covers::{is_distribution_cover, DistributionCover};
use crate::error::{Error, Result};
use crate::model::{ArmDistribution, FunctionClass};
use crate::rng::{mix64, stream, Purpose};

pub const DEFAULT_MAX_RETRIES: usize = 1000;

/// Correlation target for an escaping function.
pub const ESCAPE_TARGET: f64 = 0.2;

/// Coverage ceiling certified after rescaling.
pub const COVERAGE_CEILING: f64 = 0.6;

fn pow3(e: u32) -> Result<usize> {
    3usize
        .checked_pow(e)
        .ok_or_else(|| Error::Resource(format!("3^{e} intervals do not fit in memory")))
}

/// Smallest `M` (a multiple of 3) with `N·3^{2M/3} ≤ 3^{M−1}` and
/// `ln N · 3^{−M/3} ≤ 1/50`.
pub fn example2_parameters(n_candidates: usize) -> Result<u32> {
    if n_candidates == 0 {
        return Err(Error::param("need at least one candidate distribution"));
    }
    // With k = M/3 the conditions read 3N ≤ 3^k and 50 ln N ≤ 3^k.
    let need = (3.0 * n_candidates as f64).max(50.0 * (n_candidates as f64).ln());
    let mut k = 1u32;
    while 3f64.powi(k as i32) < need {
        k += 1;
    }
    Ok(3 * k)
}

/// Pruning threshold `3^{−2M/3}`.
pub fn prune_threshold(depth: u32) -> f64 {
    3f64.powf(-2.0 * depth as f64 / 3.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionInstance {
    pub depth: u32,
    pub n_candidates: usize,
    /// `N × 3^M`; row `k` is `p_k(A_i)` over intervals.
    pub candidate_masses: Vec<Vec<f64>>,
    pub pruned: Vec<bool>,
    /// Retained interval indices, ascending.
    pub retained: Vec<usize>,
}

impl PartitionInstance {
    /// Prunes heavy intervals and keeps the first `2·3^{M−1}` survivors.
    pub fn new(depth: u32, candidate_masses: Vec<Vec<f64>>) -> Result<Self> {
        if depth == 0 {
            return Err(Error::param("depth M must be at least 1"));
        }
        if candidate_masses.is_empty() {
            return Err(Error::param("need at least one candidate distribution"));
        }
        let n = pow3(depth)?;
        for (k, row) in candidate_masses.iter().enumerate() {
            if row.len() != n {
                return Err(Error::structural(format!(
                    "candidate {k} has {} masses, expected 3^{depth} = {n}",
                    row.len()
                )));
            }
            ArmDistribution::new(row.clone())?;
        }
        let threshold = prune_threshold(depth);
        let pruned: Vec<bool> = (0..n)
            .map(|i| candidate_masses.iter().any(|row| row[i] > threshold))
            .collect();
        let want = 2 * pow3(depth - 1)?;
        let retained: Vec<usize> = (0..n).filter(|i| !pruned[*i]).take(want).collect();
        if retained.len() < want {
            return Err(Error::param(format!(
                "only {} intervals survive pruning but |R| = {want} are needed; increase M",
                retained.len()
            )));
        }
        Ok(Self {
            depth,
            n_candidates: candidate_masses.len(),
            candidate_masses,
            pruned,
            retained,
        })
    }

    pub fn n_intervals(&self) -> usize {
        self.pruned.len()
    }

    pub fn n_pruned(&self) -> usize {
        self.pruned.iter().filter(|p| **p).count()
    }

    /// `p_k(R)` for every candidate.
    pub fn retained_mass(&self) -> Vec<f64> {
        self.candidate_masses
            .iter()
            .map(|row| self.retained.iter().map(|&i| row[i]).sum())
            .collect()
    }

    /// `max_k √(Σ_{i∈R} p_k(A_i)²)`.
    pub fn massart_radius(&self) -> f64 {
        self.candidate_masses
            .iter()
            .map(|row| {
                self.retained
                    .iter()
                    .map(|&i| row[i] * row[i])
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// `max_k Σ_{i∈R} p_k(A_i) f_i` for a function given by its `+1` set.
    ///
    /// On `R` the function is `2·1[i ∈ I] − 1`, so the sum is
    /// `2 p_k(I) − p_k(R)`.
    pub fn max_correlation(&self, plus: &[usize], retained_mass: &[f64]) -> f64 {
        self.candidate_masses
            .iter()
            .zip(retained_mass)
            .map(|(row, r)| 2.0 * plus.iter().map(|&i| row[i]).sum::<f64>() - r)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Candidate masses restricted to `R`, interleaved per retained position,
/// for repeated balanced draws.
struct Sampler<'a> {
    instance: &'a PartitionInstance,
    packed: Vec<f64>,
    mass: Vec<f64>,
}

impl<'a> Sampler<'a> {
    fn new(instance: &'a PartitionInstance) -> Self {
        let n = instance.n_candidates;
        let mut packed = Vec::with_capacity(instance.retained.len() * n);
        for &i in &instance.retained {
            packed.extend(instance.candidate_masses.iter().map(|row| row[i]));
        }
        Self {
            instance,
            packed,
            mass: instance.retained_mass(),
        }
    }

    /// Draws a uniform half of `R` without replacement into the front of
    /// `scratch` (as positions in `R`) and returns the maximal correlation.
    fn draw<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        scratch: &mut Vec<u32>,
        sums: &mut Vec<f64>,
    ) -> f64 {
        let r = self.instance.retained.len();
        scratch.clear();
        scratch.extend(0..r as u32);
        let half = r / 2;
        scratch.partial_shuffle(rng, half);
        let n = self.instance.n_candidates;
        sums.clear();
        sums.resize(n, 0.0);
        for &j in &scratch[..half] {
            let at = j as usize * n;
            for (s, p) in sums.iter_mut().zip(&self.packed[at..at + n]) {
                *s += p;
            }
        }
        sums.iter()
            .zip(&self.mass)
            .map(|(s, m)| 2.0 * s - m)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn plus_set(&self, scratch: &[u32]) -> Vec<usize> {
        let half = self.instance.retained.len() / 2;
        let mut plus: Vec<usize> = scratch[..half]
            .iter()
            .map(|&j| self.instance.retained[j as usize])
            .collect();
        plus.sort_unstable();
        plus
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CandidateKind {
    Uniform,
    /// `p_i ∝ ratio^{(i − shift_k) mod 3^M}`, shifted per candidate.
    Geometric {
        ratio: f64,
    },
    /// Normalized i.i.d. exponentials.
    Exponential,
}

pub fn generate_candidates(
    kind: CandidateKind,
    n_candidates: usize,
    depth: u32,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let n = pow3(depth)?;
    let mut rng = stream(seed, Purpose::Construction);
    (0..n_candidates)
        .map(|k| {
            let weights: Vec<f64> = match kind {
                CandidateKind::Uniform => vec![1.0; n],
                CandidateKind::Geometric { ratio } => {
                    if !(ratio > 0.0 && ratio <= 1.0) {
                        return Err(Error::param(format!(
                            "geometric ratio {ratio} is outside (0, 1]"
                        )));
                    }
                    let shift = k * n / n_candidates;
                    (0..n)
                        .map(|i| ratio.powi(((i + n - shift) % n) as i32))
                        .collect()
                }
                CandidateKind::Exponential => {
                    (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect()
                }
            };
            Ok(ArmDistribution::from_weights(weights)?.into_probs())
        })
        .collect()
}

/// Balanced `{−1, 0, +1}` function over the intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TernaryFunction {
    pub values: Vec<i8>,
    /// Intervals where the function is `+1`, ascending.
    pub plus: Vec<usize>,
}

impl TernaryFunction {
    pub fn from_plus_set(instance: &PartitionInstance, plus: Vec<usize>) -> Self {
        let mut values = vec![0i8; instance.n_intervals()];
        for &i in &instance.retained {
            values[i] = -1;
        }
        for &i in &plus {
            values[i] = 1;
        }
        Self { values, plus }
    }

    pub fn f3_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| *v as f64).collect()
    }

    /// `{0, ½, 1}` values `(f + 1) / 2`.
    pub fn f2_values(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|v| (*v as f64 + 1.0) / 2.0)
            .collect()
    }

    pub fn count(&self, value: i8) -> usize {
        self.values.iter().filter(|v| **v == value).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeResult {
    pub function: TernaryFunction,
    pub max_correlation: f64,
    pub attempts: usize,
}

/// Redraws the balanced half of `R` until every candidate correlates at
/// most `1/5` with the function.
pub fn escape_function(
    instance: &PartitionInstance,
    seed: u64,
    max_retries: usize,
) -> Result<EscapeResult> {
    let mut rng = stream(seed, Purpose::Construction);
    let sampler = Sampler::new(instance);
    let mut best = f64::INFINITY;
    let (mut scratch, mut sums) = (Vec::new(), Vec::new());
    for attempt in 1..=max_retries.max(1) {
        let corr = sampler.draw(&mut rng, &mut scratch, &mut sums);
        if corr <= ESCAPE_TARGET {
            let plus = sampler.plus_set(&scratch);
            return Ok(EscapeResult {
                function: TernaryFunction::from_plus_set(instance, plus),
                max_correlation: corr,
                attempts: attempt,
            });
        }
        best = best.min(corr);
    }
    Err(Error::ProbabilisticFailure {
        retries: max_retries,
        best,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeReport {
    pub alpha: f64,
    pub beta: f64,
    /// `p_k(f′ = 1)` per candidate.
    pub per_candidate_coverage: Vec<f64>,
    pub max_coverage: f64,
    /// `(1 − beta) − max_coverage`; positive means uncovered.
    pub margin: f64,
}

/// Certifies that the rescaled function is not `(alpha, beta)`-covered by
/// any candidate: its good region is `{f′ = 1}` for `alpha < ½`.
pub fn verify_escape(
    function: &TernaryFunction,
    instance: &PartitionInstance,
    alpha: f64,
    beta: f64,
) -> Result<EscapeReport> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::param(format!("alpha = {alpha} is outside (0, 1/2)")));
    }
    if !(beta > 0.0 && beta < 1.0 / 3.0) {
        return Err(Error::param(format!("beta = {beta} is outside (0, 1/3)")));
    }
    if function.values.len() != instance.n_intervals() {
        return Err(Error::structural(
            "function and instance disagree on the interval count",
        ));
    }
    let f2 = function.f2_values();
    let per_candidate_coverage: Vec<f64> = instance
        .candidate_masses
        .iter()
        .map(|row| {
            row.iter()
                .zip(&f2)
                .filter(|(_, v)| 1.0 - **v <= alpha)
                .map(|(p, _)| p)
                .sum()
        })
        .collect();
    let max_coverage = per_candidate_coverage.iter().copied().fold(0.0, f64::max);
    if max_coverage > COVERAGE_CEILING {
        return Err(Error::CounterexampleInvalid(format!(
            "candidate coverage {max_coverage} exceeds 3/5"
        )));
    }
    Ok(EscapeReport {
        alpha,
        beta,
        margin: 1.0 - beta - max_coverage,
        per_candidate_coverage,
        max_coverage,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassartReport {
    pub draws: usize,
    /// Mean of `max_k Σ_{i∈R} p_k(A_i) f_i` over balanced sign draws.
    pub empirical_mean: f64,
    pub stderr: f64,
    pub radius: f64,
    /// `r √(2 ln N)`.
    pub massart_bound: f64,
    /// `√(2 ln N · 3^{−M/3})`, the instance-free relaxation.
    pub relaxed_bound: f64,
}

/// Monte-Carlo estimate of the expected maximal correlation.
pub fn massart_check(
    instance: &PartitionInstance,
    draws: usize,
    seed: u64,
) -> Result<MassartReport> {
    if draws == 0 {
        return Err(Error::param("need at least one draw"));
    }
    let sampler = Sampler::new(instance);
    let samples: Vec<f64> = (0..draws as u64)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(scratch, sums), d| {
                let mut rng = stream(mix64(seed ^ mix64(d)), Purpose::Construction);
                sampler.draw(&mut rng, scratch, sums)
            },
        )
        .collect();
    let n = draws as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = if draws > 1 {
        samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let radius = instance.massart_radius();
    let log_n = (instance.n_candidates as f64).ln();
    Ok(MassartReport {
        draws,
        empirical_mean: mean,
        stderr: (var / n).sqrt(),
        radius,
        massart_bound: radius * (2.0 * log_n).sqrt(),
        relaxed_bound: (2.0 * log_n * 3f64.powf(-(instance.depth as f64) / 3.0)).sqrt(),
    })
}

/// Discretized almost-everywhere-one class with a single uniform cover.
///
/// Every function is one except at its listed zero positions, so the uniform
/// distribution misses its good region with probability at most `k / n`.
pub fn example1_demo(
    n_arms: usize,
    zero_positions: &[Vec<usize>],
) -> Result<(FunctionClass, DistributionCover)> {
    let k = zero_positions.iter().map(Vec::len).max().unwrap_or(0);
    if n_arms == 0 || k >= n_arms {
        return Err(Error::DegenerateClass(format!(
            "{k} zero positions leave no optimal arm among {n_arms}"
        )));
    }
    let rows = if zero_positions.is_empty() {
        vec![vec![1.0; n_arms]]
    } else {
        zero_positions
            .iter()
            .map(|zeros| {
                let mut row = vec![1.0; n_arms];
                for &z in zeros {
                    *row.get_mut(z).ok_or(Error::Index {
                        what: "arm space",
                        index: z,
                        len: n_arms,
                    })? = 0.0;
                }
                Ok(row)
            })
            .collect::<Result<_>>()?
    };
    let class = FunctionClass::new(rows)?;
    let cover = DistributionCover {
        alpha: 0.5,
        beta: k as f64 / n_arms as f64,
        dists: vec![ArmDistribution::uniform(n_arms)?],
    };
    if !is_distribution_cover(&class, cover.alpha, cover.beta, &cover.dists) {
        return Err(Error::CounterexampleInvalid(
            "uniform distribution fails to cover the class".into(),
        ));
    }
    Ok((class, cover))
}

/// Discretized `{0, ½, 1}` class on `n` arms (`n` divisible by 3).
///
/// For every arm `π` it holds the pair `f₁, f₂` whose one-sets meet exactly
/// in `π` and whose half-sets coincide, each with `n/3` ones, halves and
/// zeros. The midpoint of a pair is `1` at `π` and at most `½` elsewhere, so
/// the convexified volume is at most `1/n` while uniform play keeps `1/3`.
pub fn example2_class(n: usize) -> Result<FunctionClass> {
    if n < 3 || n % 3 != 0 {
        return Err(Error::param(format!(
            "arm count {n} must be a positive multiple of 3"
        )));
    }
    let third = n / 3;
    let mut rows = Vec::with_capacity(2 * n);
    for pi in 0..n {
        // Arms after π in cyclic order: y, then A, B, H.
        let at = |j: usize| (pi + 1 + j) % n;
        let y = at(0);
        let a: Vec<usize> = (1..third).map(at).collect();
        let b: Vec<usize> = (third..2 * third - 1).map(at).collect();
        let h: Vec<usize> = (2 * third - 1..n - 1).map(at).collect();
        for (ones, zeros) in [(&a, &b), (&b, &a)] {
            let mut row = vec![0.0; n];
            row[pi] = 1.0;
            for &i in ones {
                row[i] = 1.0;
            }
            for &i in &h {
                row[i] = 0.5;
            }
            for &i in zeros.iter().chain([&y]) {
                row[i] = 0.0;
            }
            rows.push(row);
        }
    }
    FunctionClass::new(rows)
}
