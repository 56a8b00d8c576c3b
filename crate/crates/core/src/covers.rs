//! α-hitting sets and (α, β)-distribution covers.

use serde::{Deserialize, Serialize};

use crate::complexity::good_region;
use crate::error::{Error, Result};
use crate::model::{ArmDistribution, FunctionClass};
use crate::scalar::Scalar;

/// Arms such that every function has an `alpha`-good arm among them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct HittingSet<S: Scalar = f64> {
    pub alpha: S,
    pub arms: Vec<usize>,
}

/// Distributions such that every function has one placing at least
/// `1 − beta` mass on its `alpha`-good region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct DistributionCover<S: Scalar = f64> {
    pub alpha: S,
    pub beta: S,
    pub dists: Vec<ArmDistribution<S>>,
}

impl<S: Scalar> HittingSet<S> {
    pub fn new(alpha: S, arms: Vec<usize>) -> Self {
        Self { alpha, arms }
    }

    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    /// Point masses on the hitting arms: an `(alpha, 0)` cover.
    pub fn to_cover(&self, n_arms: usize) -> Result<DistributionCover<S>> {
        Ok(DistributionCover {
            alpha: self.alpha,
            beta: S::zero(),
            dists: self
                .arms
                .iter()
                .map(|&a| ArmDistribution::point_mass(n_arms, a))
                .collect::<Result<_>>()?,
        })
    }
}

impl<S: Scalar> DistributionCover<S> {
    pub fn len(&self) -> usize {
        self.dists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dists.is_empty()
    }
}

fn check_alpha_beta<S: Scalar>(alpha: S, beta: S) -> Result<()> {
    if !(alpha > S::zero() && alpha <= S::one()) {
        return Err(Error::param(format!("alpha = {alpha} is outside (0, 1]")));
    }
    if !(beta >= S::zero() && beta < S::one()) {
        return Err(Error::param(format!("beta = {beta} is outside [0, 1)")));
    }
    Ok(())
}

fn row_sup<S: Scalar>(row: &[S]) -> S {
    row.iter().copied().fold(S::neg_infinity(), S::max)
}

/// Checks the hitting property from the raw means.
pub fn is_hitting_set<S: Scalar>(class: &FunctionClass<S>, alpha: S, arms: &[usize]) -> bool {
    if arms.iter().any(|a| *a >= class.n_arms()) {
        return false;
    }
    class.means().iter().all(|row| {
        let sup = row_sup(row);
        arms.iter().any(|&a| sup - row[a] <= alpha)
    })
}

/// Largest `β` shortfall over functions: `max_f (1 − max_p p(good(f)))`.
pub fn cover_shortfall<S: Scalar>(
    class: &FunctionClass<S>,
    alpha: S,
    dists: &[ArmDistribution<S>],
) -> S {
    class
        .means()
        .iter()
        .map(|row| {
            let sup = row_sup(row);
            let best = dists
                .iter()
                .map(|d| {
                    d.probs()
                        .iter()
                        .zip(row)
                        .filter(|(_, v)| sup - **v <= alpha)
                        .map(|(p, _)| *p)
                        .sum::<S>()
                })
                .fold(S::zero(), S::max);
            S::one() - best
        })
        .fold(S::zero(), S::max)
}

/// Checks the cover property, allowing the probability-vector tolerance.
pub fn is_distribution_cover<S: Scalar>(
    class: &FunctionClass<S>,
    alpha: S,
    beta: S,
    dists: &[ArmDistribution<S>],
) -> bool {
    !dists.is_empty()
        && dists.iter().all(|d| d.n_arms() == class.n_arms())
        && cover_shortfall(class, alpha, dists) <= beta + S::prob_tolerance()
}

/// Greedy set cover over good-region columns; ties go to the lowest arm.
pub fn greedy_hitting_set<S: Scalar>(class: &FunctionClass<S>, alpha: S) -> Result<HittingSet<S>> {
    let mask = good_region(class, alpha)?;
    let mut uncovered = vec![true; class.n_functions()];
    let mut remaining = class.n_functions();
    let mut arms = Vec::new();
    while remaining > 0 {
        let (best_arm, gain) = (0..class.n_arms())
            .map(|a| {
                let gain = (0..class.n_functions())
                    .filter(|&f| uncovered[f] && mask.mask[f][a])
                    .count();
                (a, gain)
            })
            .fold((0, 0), |best, cur| if cur.1 > best.1 { cur } else { best });
        debug_assert!(gain > 0, "every function's argmax covers it");
        for (f, u) in uncovered.iter_mut().enumerate() {
            if *u && mask.mask[f][best_arm] {
                *u = false;
                remaining -= 1;
            }
        }
        arms.push(best_arm);
    }
    Ok(HittingSet::new(alpha, arms))
}

/// Default number of subsets [`exact_hitting_set`] may examine.
pub const DEFAULT_SUBSET_BUDGET: u64 = 20_000_000;

/// Minimum-cardinality hitting set by exhaustive search over subsets of
/// increasing size, or `None` if none of size `≤ cap` exists.
pub fn exact_hitting_set<S: Scalar>(
    class: &FunctionClass<S>,
    alpha: S,
    cap: usize,
    budget: u64,
) -> Result<Option<HittingSet<S>>> {
    let n = class.n_arms();
    if cap > n {
        return Err(Error::param(format!("cap {cap} exceeds the {n} arms")));
    }
    let mask = good_region(class, alpha)?;
    let n_f = class.n_functions();
    let words = n_f.div_ceil(64);
    let columns: Vec<Vec<u64>> = (0..n)
        .map(|a| {
            let mut col = vec![0u64; words];
            for f in 0..n_f {
                if mask.mask[f][a] {
                    col[f / 64] |= 1 << (f % 64);
                }
            }
            col
        })
        .collect();
    let full: Vec<u64> = (0..words)
        .map(|w| {
            let bits = (n_f - w * 64).min(64);
            if bits == 64 {
                u64::MAX
            } else {
                (1u64 << bits) - 1
            }
        })
        .collect();

    let mut examined = 0u64;
    for size in 1..=cap {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            examined += 1;
            if examined > budget {
                return Err(Error::Resource(format!(
                    "exhaustive hitting-set search exceeded {budget} subsets at size {size}"
                )));
            }
            let hits =
                (0..words).all(|w| idx.iter().fold(0u64, |acc, &a| acc | columns[a][w]) == full[w]);
            if hits {
                return Ok(Some(HittingSet::new(alpha, idx)));
            }
            // Next combination in lexicographic order.
            let Some(pos) = (0..size).rev().find(|&i| idx[i] < n - size + i) else {
                break;
            };
            idx[pos] += 1;
            for i in pos + 1..size {
                idx[i] = idx[i - 1] + 1;
            }
        }
    }
    Ok(None)
}

/// Turns a maximin witness into a finite hitting set by keeping the heaviest
/// arms until the discarded tail has mass at most `gamma_value / 4`.
pub fn witness_to_hitting_set<S: Scalar>(
    witness: &ArmDistribution<S>,
    gamma_value: S,
    class: &FunctionClass<S>,
    alpha: S,
) -> Result<HittingSet<S>> {
    if !(gamma_value > S::zero()) {
        return Err(Error::param(format!(
            "gamma value {gamma_value} must be positive"
        )));
    }
    if witness.n_arms() != class.n_arms() {
        return Err(Error::structural("witness and class disagree on arm count"));
    }
    let mask = good_region(class, alpha)?;
    let guaranteed = mask
        .mask
        .iter()
        .map(|row| witness.mass_on(row))
        .fold(S::infinity(), S::min);
    let half = gamma_value / S::of(2.0);
    if guaranteed < half - S::prob_tolerance() {
        return Err(Error::InvalidWitness(format!(
            "witness guarantees {guaranteed}, below gamma/2 = {half}"
        )));
    }

    let probs = witness.probs();
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| probs[b].partial_cmp(&probs[a]).unwrap().then(a.cmp(&b)));
    // tails[k] = mass of order[k..]
    let mut tails = vec![S::zero(); order.len() + 1];
    for k in (0..order.len()).rev() {
        tails[k] = tails[k + 1] + probs[order[k]];
    }
    let threshold = gamma_value / S::of(4.0);
    let len = (0..=order.len())
        .find(|&k| tails[k] <= threshold)
        .expect("empty tail has zero mass");
    let arms = order[..len].to_vec();
    if !is_hitting_set(class, alpha, &arms) {
        return Err(Error::InvalidWitness(format!(
            "prefix of {len} heaviest arms misses some function"
        )));
    }
    Ok(HittingSet::new(alpha, arms))
}

/// Greedy cover from the candidate pool: the uniform distribution over each
/// function's good region (in class order), then the uniform distribution
/// over all arms.
pub fn greedy_distribution_cover<S: Scalar>(
    class: &FunctionClass<S>,
    alpha: S,
    beta: S,
) -> Result<DistributionCover<S>> {
    check_alpha_beta(alpha, beta)?;
    let mask = good_region(class, alpha)?;
    let mut candidates: Vec<ArmDistribution<S>> = mask
        .mask
        .iter()
        .map(|row| ArmDistribution::uniform_over(row))
        .collect::<Result<_>>()?;
    candidates.push(ArmDistribution::uniform(class.n_arms())?);

    let need = S::one() - beta - S::prob_tolerance();
    let covers: Vec<Vec<bool>> = candidates
        .iter()
        .map(|c| mask.mask.iter().map(|row| c.mass_on(row) >= need).collect())
        .collect();

    let mut uncovered = vec![true; class.n_functions()];
    let mut remaining = class.n_functions();
    let mut chosen = Vec::new();
    while remaining > 0 {
        let (best, gain) = covers
            .iter()
            .enumerate()
            .map(|(i, cov)| {
                (
                    i,
                    cov.iter()
                        .zip(&uncovered)
                        .filter(|(c, u)| **c && **u)
                        .count(),
                )
            })
            .fold((0, 0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if gain == 0 {
            return Err(Error::Solver(
                "distribution cover greedy made no progress".into(),
            ));
        }
        for (u, c) in uncovered.iter_mut().zip(&covers[best]) {
            if *u && *c {
                *u = false;
                remaining -= 1;
            }
        }
        chosen.push(candidates[best].clone());
    }
    Ok(DistributionCover {
        alpha,
        beta,
        dists: chosen,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexity::gamma;
    use proptest::prelude::*;

    fn class(means: Vec<Vec<f64>>) -> FunctionClass {
        FunctionClass::new(means).unwrap()
    }

    /// Minimum hitting-set size by brute force over all `2^n` subsets.
    fn brute_min_hitting(c: &FunctionClass, alpha: f64) -> usize {
        let n = c.n_arms();
        (1u32..(1 << n))
            .filter(|s| {
                let arms: Vec<usize> = (0..n).filter(|a| s >> a & 1 == 1).collect();
                is_hitting_set(c, alpha, &arms)
            })
            .map(|s| s.count_ones() as usize)
            .min()
            .unwrap()
    }

    /// Example 1 on `n` arms: one function per listed zero arm, 1 elsewhere.
    fn zero_arm_class(n: usize, zeros: &[usize]) -> FunctionClass {
        class(
            zeros
                .iter()
                .map(|&z| (0..n).map(|a| if a == z { 0.0 } else { 1.0 }).collect())
                .collect(),
        )
    }

    #[test]
    fn shared_argmax_gives_singleton() {
        let c = class(vec![vec![0.2, 1.0, 0.1], vec![0.5, 0.9, 0.0]]);
        assert_eq!(greedy_hitting_set(&c, 0.05).unwrap().arms, vec![1]);
    }

    #[test]
    fn identity_pair_needs_two_arms() {
        let c = class(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let g = greedy_hitting_set(&c, 0.5).unwrap();
        assert_eq!(g.arms, vec![0, 1]);
        assert_eq!(brute_min_hitting(&c, 0.5), 2);
        let e = exact_hitting_set(&c, 0.5, 2, DEFAULT_SUBSET_BUDGET)
            .unwrap()
            .unwrap();
        assert_eq!(e.len(), 2);
        assert!(exact_hitting_set(&c, 0.5, 1, DEFAULT_SUBSET_BUDGET)
            .unwrap()
            .is_none());
    }

    #[test]
    fn zero_arm_classes_are_hit_by_at_most_two_arms() {
        for n in 2..=8 {
            // Some arm is nobody's zero: one arm suffices.
            let c = zero_arm_class(n, &(0..n - 1).collect::<Vec<_>>());
            assert_eq!(greedy_hitting_set(&c, 0.5).unwrap().len(), 1);
            assert_eq!(brute_min_hitting(&c, 0.5), 1);
            // Every arm is somebody's zero: two arms needed.
            let c = zero_arm_class(n, &(0..n).collect::<Vec<_>>());
            assert_eq!(greedy_hitting_set(&c, 0.5).unwrap().len(), 2);
            assert_eq!(brute_min_hitting(&c, 0.5), 2);
        }
    }

    #[test]
    fn exact_small_cases() {
        let c = class(vec![vec![0.1, 0.8, 0.3]]);
        assert_eq!(
            exact_hitting_set(&c, 0.1, 3, 1000).unwrap().unwrap().arms,
            vec![1]
        );
        let flat = class(vec![vec![0.4; 4], vec![0.7; 4]]);
        assert_eq!(
            exact_hitting_set(&flat, 0.1, 4, 1000)
                .unwrap()
                .unwrap()
                .arms,
            vec![0]
        );
        assert!(exact_hitting_set(&flat, 0.1, 5, 1000).is_err());
    }

    #[test]
    fn exact_budget_is_enforced() {
        let c = zero_arm_class(20, &(0..20).collect::<Vec<_>>());
        let diag = class(
            (0..20)
                .map(|i| (0..20).map(|a| (a == i) as u8 as f64).collect())
                .collect(),
        );
        assert!(exact_hitting_set(&c, 0.5, 2, 1000).unwrap().is_some());
        assert!(matches!(
            exact_hitting_set(&diag, 0.5, 20, 1000),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn witness_truncation_examples() {
        let n = 5;
        let c = class(vec![vec![1.0; n]]);
        let point = ArmDistribution::point_mass(n, 3).unwrap();
        assert_eq!(
            witness_to_hitting_set(&point, 1.0, &c, 0.5).unwrap().arms,
            vec![3]
        );

        let geo = ArmDistribution::new(vec![0.5, 0.25, 0.125, 0.0625, 0.0625]).unwrap();
        let h = witness_to_hitting_set(&geo, 0.4, &c, 0.5).unwrap();
        // Prefix-sum oracle: tail after k arms = 1 − Σ_{i<k} p_i.
        let prefix = [0.5, 0.75, 0.875, 0.9375, 1.0];
        let k = prefix.iter().position(|s| 1.0 - s <= 0.1).unwrap() + 1;
        assert_eq!(h.len(), k);
        assert_eq!(h.len(), 4);

        for (n, g) in [(8usize, 0.5f64), (16, 0.75), (32, 0.3)] {
            let c = class(vec![vec![1.0; n]]);
            let u = ArmDistribution::uniform(n).unwrap();
            let h = witness_to_hitting_set(&u, g, &c, 0.5).unwrap();
            assert_eq!(
                h.len(),
                n - (n as f64 * g / 4.0).floor() as usize,
                "n={n} g={g}"
            );
        }
    }

    #[test]
    fn witness_truncation_errors() {
        let c = class(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let u = ArmDistribution::uniform(2).unwrap();
        assert!(matches!(
            witness_to_hitting_set(&u, 0.0, &c, 0.5),
            Err(Error::Parameter(_))
        ));
        let point = ArmDistribution::point_mass(2, 0).unwrap();
        assert!(matches!(
            witness_to_hitting_set(&point, 0.5, &c, 0.5),
            Err(Error::InvalidWitness(_))
        ));
    }

    #[test]
    fn distribution_cover_examples() {
        let n = 10;
        let c = zero_arm_class(n, &(0..n).collect::<Vec<_>>());
        let cover = greedy_distribution_cover(&c, 0.5, 0.1).unwrap();
        assert_eq!(cover.len(), 1);
        assert_eq!(cover.dists[0], ArmDistribution::uniform(n).unwrap());

        let shared = class(vec![vec![0.2, 1.0, 0.1], vec![0.5, 0.9, 0.0]]);
        let h = greedy_hitting_set(&shared, 0.1).unwrap();
        assert!(is_distribution_cover(
            &shared,
            0.1,
            0.0,
            &h.to_cover(3).unwrap().dists
        ));

        let pair = class(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let cover = greedy_distribution_cover(&pair, 0.5, 0.4).unwrap();
        assert_eq!(
            cover.dists,
            vec![
                ArmDistribution::point_mass(2, 0).unwrap(),
                ArmDistribution::point_mass(2, 1).unwrap()
            ]
        );
        assert!(!is_distribution_cover(
            &pair,
            0.5,
            0.4,
            &[ArmDistribution::uniform(2).unwrap()]
        ));
    }

    #[test]
    fn cover_parameter_errors() {
        let c = class(vec![vec![1.0]]);
        assert!(greedy_distribution_cover(&c, 0.5, 1.0).is_err());
        assert!(greedy_distribution_cover(&c, 0.0, 0.1).is_err());
    }

    fn instance() -> impl Strategy<Value = (Vec<Vec<f64>>, f64)> {
        (1usize..7, 1usize..9).prop_flat_map(|(f, a)| {
            (
                prop::collection::vec(prop::collection::vec(0.0..=1.0f64, a), f),
                prop::sample::select(vec![0.05, 0.1, 0.3, 0.5]),
            )
        })
    }

    proptest! {
        #[test]
        fn greedy_outputs_pass_the_checkers((means, alpha) in instance(), beta in 0.0..0.9f64) {
            let c = class(means);
            let h = greedy_hitting_set(&c, alpha).unwrap();
            prop_assert!(is_hitting_set(&c, alpha, &h.arms));
            let as_cover = h.to_cover(c.n_arms()).unwrap();
            prop_assert!(is_distribution_cover(&c, alpha, 0.0, &as_cover.dists));
            let cover = greedy_distribution_cover(&c, alpha, beta).unwrap();
            prop_assert!(is_distribution_cover(&c, alpha, beta, &cover.dists));
            prop_assert!(is_distribution_cover(&c, alpha, (beta + 0.05).min(0.99), &cover.dists));
        }

        #[test]
        fn greedy_within_log_factor_of_exact((means, alpha) in instance()) {
            let c = class(means);
            let g = greedy_hitting_set(&c, alpha).unwrap().len();
            let e = exact_hitting_set(&c, alpha, c.n_arms(), DEFAULT_SUBSET_BUDGET).unwrap().unwrap();
            prop_assert!(is_hitting_set(&c, alpha, &e.arms));
            prop_assert_eq!(e.len(), brute_min_hitting(&c, alpha));
            let bound = e.len() as f64 * (1.0 + (c.n_functions() as f64).ln());
            prop_assert!(g as f64 <= bound + 1e-12);
        }

        #[test]
        fn solved_witnesses_truncate_to_hitting_sets((means, alpha) in instance()) {
            let c = class(means);
            let sol = gamma(&c, alpha).unwrap();
            let h = witness_to_hitting_set(&sol.witness, sol.value, &c, alpha).unwrap();
            prop_assert!(is_hitting_set(&c, alpha, &h.arms));
        }
    }
}
