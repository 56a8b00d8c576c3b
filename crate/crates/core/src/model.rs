//! Arm spaces, function classes, mixtures, arm distributions and the regret
//! functional.

use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rng::sample_index;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArmSpace {
    n_arms: usize,
    labels: Option<Vec<String>>,
}

impl ArmSpace {
    pub fn new(n_arms: usize) -> Result<Self> {
        if n_arms == 0 {
            return Err(Error::param("arm space needs at least one arm"));
        }
        Ok(Self {
            n_arms,
            labels: None,
        })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        let mut space = Self::new(labels.len())?;
        let mut seen = std::collections::BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::param(format!("duplicate arm label `{l}`")));
            }
        }
        space.labels = Some(labels);
        Ok(space)
    }

    pub fn n_arms(&self) -> usize {
        self.n_arms
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn check_arm(&self, arm: usize) -> Result<()> {
        if arm >= self.n_arms {
            return Err(Error::Index {
                what: "arm space",
                index: arm,
                len: self.n_arms,
            });
        }
        Ok(())
    }
}

/// An explicit finite class of mean-reward functions, stored as a dense
/// `n_functions × n_arms` matrix with entries in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionClass<S: Scalar = f64> {
    arms: ArmSpace,
    means: Vec<Vec<S>>,
}

impl<S: Scalar> FunctionClass<S> {
    pub fn new(means: Vec<Vec<S>>) -> Result<Self> {
        let n_arms = means.first().map(Vec::len).unwrap_or(0);
        Self::with_arms(ArmSpace::new(n_arms.max(1))?, means)
    }

    pub fn with_arms(arms: ArmSpace, means: Vec<Vec<S>>) -> Result<Self> {
        if means.is_empty() {
            return Err(Error::param("function class needs at least one function"));
        }
        for (f, row) in means.iter().enumerate() {
            if row.len() != arms.n_arms() {
                return Err(Error::structural(format!(
                    "function {f} has {} values but the arm space has {} arms",
                    row.len(),
                    arms.n_arms()
                )));
            }
            if let Some((a, v)) = row
                .iter()
                .enumerate()
                .find(|(_, v)| !(**v >= S::zero() && **v <= S::one()))
            {
                return Err(Error::param(format!(
                    "mean reward {v} of function {f} at arm {a} is outside [0, 1]"
                )));
            }
        }
        Ok(Self { arms, means })
    }

    pub fn arms(&self) -> &ArmSpace {
        &self.arms
    }

    pub fn n_arms(&self) -> usize {
        self.arms.n_arms()
    }

    pub fn n_functions(&self) -> usize {
        self.means.len()
    }

    pub fn means(&self) -> &[Vec<S>] {
        &self.means
    }

    pub fn row(&self, f: usize) -> Result<&[S]> {
        self.means.get(f).map(Vec::as_slice).ok_or(Error::Index {
            what: "function class",
            index: f,
            len: self.means.len(),
        })
    }

    pub fn value(&self, f: usize, arm: usize) -> Result<S> {
        self.arms.check_arm(arm)?;
        Ok(self.row(f)?[arm])
    }

    /// Pointwise values `Σ_i w_i f_i` of a weight vector over the functions.
    pub fn combine(&self, weights: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.n_arms()];
        for (w, row) in weights.iter().zip(&self.means) {
            if *w == S::zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(row) {
                *o = *o + *w * *v;
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Serialize, Deserialize)]
struct ClassDocument<S> {
    arms: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    means: Vec<Vec<S>>,
}

impl<S: Scalar> Serialize for FunctionClass<S> {
    fn serialize<Z: Serializer>(&self, serializer: Z) -> std::result::Result<Z::Ok, Z::Error> {
        ClassDocument {
            arms: self.n_arms(),
            labels: self.arms.labels.clone(),
            means: self.means.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for FunctionClass<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = ClassDocument::<S>::deserialize(deserializer)?;
        let arms = match doc.labels {
            Some(labels) => {
                if labels.len() != doc.arms {
                    return Err(D::Error::custom(format!(
                        "{} labels given for {} arms",
                        labels.len(),
                        doc.arms
                    )));
                }
                ArmSpace::with_labels(labels)
            }
            None => ArmSpace::new(doc.arms),
        }
        .map_err(D::Error::custom)?;
        FunctionClass::with_arms(arms, doc.means).map_err(D::Error::custom)
    }
}

/// Checks a probability vector and renormalizes it exactly onto the simplex.
fn normalize<S: Scalar>(mut v: Vec<S>, what: &str) -> Result<Vec<S>> {
    if v.is_empty() {
        return Err(Error::param(format!("{what} is empty")));
    }
    let tol = S::prob_tolerance();
    if let Some(x) = v.iter().find(|x| !x.is_finite() || **x < -tol) {
        return Err(Error::param(format!("{what} has invalid entry {x}")));
    }
    let total: S = v.iter().copied().sum();
    if (total - S::one()).abs() > tol {
        return Err(Error::param(format!("{what} sums to {total}, not 1")));
    }
    for x in v.iter_mut() {
        *x = x.max(S::zero()) / total;
    }
    Ok(v)
}

/// An element of the convex hull of a [`FunctionClass`].
#[derive(Debug, Clone)]
pub struct Mixture<'a, S: Scalar = f64> {
    base: &'a FunctionClass<S>,
    weights: Vec<S>,
}

impl<'a, S: Scalar> Mixture<'a, S> {
    pub fn new(base: &'a FunctionClass<S>, weights: Vec<S>) -> Result<Self> {
        if weights.len() != base.n_functions() {
            return Err(Error::structural(format!(
                "{} mixture weights for {} functions",
                weights.len(),
                base.n_functions()
            )));
        }
        Ok(Self {
            base,
            weights: normalize(weights, "mixture weights")?,
        })
    }

    pub fn pure(base: &'a FunctionClass<S>, f: usize) -> Result<Self> {
        base.row(f)?;
        let mut weights = vec![S::zero(); base.n_functions()];
        weights[f] = S::one();
        Ok(Self { base, weights })
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn base(&self) -> &FunctionClass<S> {
        self.base
    }

    /// `Σ_i w_i f_i(arm)`.
    pub fn evaluate(&self, arm: usize) -> Result<S> {
        self.base.arms().check_arm(arm)?;
        let v: S = self
            .weights
            .iter()
            .zip(self.base.means())
            .map(|(w, row)| *w * row[arm])
            .sum();
        Ok(v.max(S::zero()).min(S::one()))
    }

    pub fn values(&self) -> Vec<S> {
        self.base.combine(&self.weights)
    }
}

pub fn evaluate_mixture<S: Scalar>(m: &Mixture<'_, S>, arm: usize) -> Result<S> {
    m.evaluate(arm)
}

/// A probability vector over arms.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ArmDistribution<S: Scalar = f64> {
    probs: Vec<S>,
}

impl<S: Scalar> ArmDistribution<S> {
    pub fn new(probs: Vec<S>) -> Result<Self> {
        Ok(Self {
            probs: normalize(probs, "arm distribution")?,
        })
    }

    /// Normalizes arbitrary non-negative weights.
    pub fn from_weights(weights: Vec<S>) -> Result<Self> {
        let total: S = weights.iter().copied().sum();
        if !(total > S::zero()) || weights.iter().any(|w| *w < S::zero() || !w.is_finite()) {
            return Err(Error::param(
                "weights must be non-negative with positive total",
            ));
        }
        Ok(Self {
            probs: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn uniform(n_arms: usize) -> Result<Self> {
        if n_arms == 0 {
            return Err(Error::param("uniform distribution over zero arms"));
        }
        Ok(Self {
            probs: vec![S::one() / S::of_usize(n_arms); n_arms],
        })
    }

    pub fn point_mass(n_arms: usize, arm: usize) -> Result<Self> {
        ArmSpace::new(n_arms)?.check_arm(arm)?;
        let mut probs = vec![S::zero(); n_arms];
        probs[arm] = S::one();
        Ok(Self { probs })
    }

    /// Uniform over the arms where `mask` is true.
    pub fn uniform_over(mask: &[bool]) -> Result<Self> {
        let k = mask.iter().filter(|b| **b).count();
        if k == 0 {
            return Err(Error::param("uniform distribution over an empty arm set"));
        }
        let p = S::one() / S::of_usize(k);
        Ok(Self {
            probs: mask
                .iter()
                .map(|b| if *b { p } else { S::zero() })
                .collect(),
        })
    }

    pub fn n_arms(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[S] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<S> {
        self.probs
    }

    /// Probability of the arm set selected by `mask`.
    pub fn mass_on(&self, mask: &[bool]) -> S {
        self.probs
            .iter()
            .zip(mask)
            .filter(|(_, m)| **m)
            .map(|(p, _)| *p)
            .sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        sample_index(&self.probs, rng)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for ArmDistribution<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let probs = Vec::<S>::deserialize(deserializer)?;
        ArmDistribution::new(probs).map_err(D::Error::custom)
    }
}

/// One simulated run: the adversary's functions, the learner's arms and the
/// realized rewards, round by round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct Trace<S: Scalar = f64> {
    horizon: usize,
    chosen_arms: Vec<usize>,
    rewards: Vec<S>,
    adversary_function_indices: Vec<usize>,
    seed: u64,
}

impl<S: Scalar> Trace<S> {
    pub fn new(
        chosen_arms: Vec<usize>,
        rewards: Vec<S>,
        adversary_function_indices: Vec<usize>,
        seed: u64,
    ) -> Result<Self> {
        let horizon = chosen_arms.len();
        if rewards.len() != horizon || adversary_function_indices.len() != horizon {
            return Err(Error::structural(format!(
                "trace sequences have lengths {}, {}, {}",
                horizon,
                rewards.len(),
                adversary_function_indices.len()
            )));
        }
        if let Some(r) = rewards
            .iter()
            .find(|r| !(**r >= S::zero() && **r <= S::one()))
        {
            return Err(Error::param(format!("reward {r} outside [0, 1]")));
        }
        Ok(Self {
            horizon,
            chosen_arms,
            rewards,
            adversary_function_indices,
            seed,
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn chosen_arms(&self) -> &[usize] {
        &self.chosen_arms
    }

    pub fn rewards(&self) -> &[S] {
        &self.rewards
    }

    pub fn adversary_function_indices(&self) -> &[usize] {
        &self.adversary_function_indices
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Regret against the best fixed arm in hindsight, measured on the
/// adversary's mean functions rather than on realized rewards:
/// `max_a Σ_t f_t(a) − Σ_t f_t(π_t)`.
///
/// The value is signed. When the function sequence varies, a learner that
/// switches arms can beat every fixed arm and the result goes negative.
pub fn regret<S: Scalar>(trace: &Trace<S>, class: &FunctionClass<S>) -> Result<S> {
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(trace.horizon);
    for (&f, &arm) in trace
        .adversary_function_indices
        .iter()
        .zip(&trace.chosen_arms)
    {
        let row = class
            .means
            .get(f)
            .ok_or_else(|| Error::structural(format!("trace references function {f}")))?;
        if arm >= row.len() {
            return Err(Error::structural(format!("trace references arm {arm}")));
        }
        pairs.push((f, arm));
    }
    pairs.sort_unstable();
    let mut counted: Vec<(usize, usize, S)> = Vec::new();
    for (f, a) in pairs {
        match counted.last_mut() {
            Some((g, b, c)) if *g == f && *b == a => *c = *c + S::one(),
            _ => counted.push((f, a, S::one())),
        }
    }
    // Summing per-round gaps keeps the result exactly non-negative when a
    // single function is played.
    let best = (0..class.n_arms())
        .map(|a| {
            counted
                .iter()
                .map(|&(f, played, c)| c * (class.means[f][a] - class.means[f][played]))
                .sum::<S>()
        })
        .fold(S::neg_infinity(), S::max);
    Ok(best)
}
