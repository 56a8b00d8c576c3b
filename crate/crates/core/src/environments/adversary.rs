use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::FunctionClass;
use crate::rng::sample_index;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn label(self) -> &'static str {
        match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        }
    }
}

/// Interaction so far, as seen by an adaptive adversary before it commits
/// to the next function.
#[derive(Debug, Clone, Default)]
pub struct History<S: Scalar = f64> {
    pub arms: Vec<usize>,
    pub rewards: Vec<S>,
    pub functions: Vec<usize>,
    pub arm_counts: Vec<usize>,
}

impl<S: Scalar> History<S> {
    pub fn new(n_arms: usize) -> Self {
        Self {
            arms: Vec::new(),
            rewards: Vec::new(),
            functions: Vec::new(),
            arm_counts: vec![0; n_arms],
        }
    }

    pub fn rounds(&self) -> usize {
        self.arms.len()
    }

    pub fn push(&mut self, function: usize, arm: usize, reward: S) {
        self.functions.push(function);
        self.arms.push(arm);
        self.rewards.push(reward);
        self.arm_counts[arm] += 1;
    }

    /// Most played arm so far, lowest index on ties.
    pub fn modal_arm(&self) -> Option<usize> {
        if self.arms.is_empty() {
            return None;
        }
        let mut best = 0;
        for (a, c) in self.arm_counts.iter().enumerate() {
            if *c > self.arm_counts[best] {
                best = a;
            }
        }
        Some(best)
    }
}

/// How the adversary picks `f_t`. Immutable; per-round state lives in the
/// [`History`] passed to [`Adversary::choose`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound = "S: Scalar")]
pub enum Adversary<S: Scalar = f64> {
    /// Oblivious: `sequence[t]` at round `t`.
    FixedSequence { sequence: Vec<usize> },
    /// Oblivious: i.i.d. draws from `weights` over functions.
    IidMixture { weights: Vec<S> },
    /// Adaptive: the function worst for the learner's most played arm.
    AdaptivePunisher,
    /// Two-environment lower-bound pair over functions 0 and 1: function 0
    /// with probability `1/2 + delta` under `Plus`, `1/2 − delta` under `Minus`.
    LowerBoundPair { delta: S, sign: Sign },
}

impl<S: Scalar> Adversary<S> {
    pub fn validate(&self, class: &FunctionClass<S>, horizon: usize) -> Result<()> {
        let n_f = class.n_functions();
        match self {
            Adversary::FixedSequence { sequence } => {
                if sequence.len() < horizon {
                    return Err(Error::structural(format!(
                        "fixed sequence has {} rounds, horizon is {horizon}",
                        sequence.len()
                    )));
                }
                if let Some(f) = sequence.iter().find(|f| **f >= n_f) {
                    return Err(Error::Index {
                        what: "function class",
                        index: *f,
                        len: n_f,
                    });
                }
            }
            Adversary::IidMixture { weights } => {
                if weights.len() != n_f {
                    return Err(Error::structural(format!(
                        "{} mixture weights for {n_f} functions",
                        weights.len()
                    )));
                }
                crate::model::ArmDistribution::new(weights.clone())?;
            }
            Adversary::AdaptivePunisher => {}
            Adversary::LowerBoundPair { delta, .. } => {
                if n_f < 2 {
                    return Err(Error::structural("lower-bound pair needs two functions"));
                }
                if !(*delta >= S::zero() && *delta <= S::of(0.5)) {
                    return Err(Error::param(format!("delta {delta} outside [0, 1/2]")));
                }
            }
        }
        Ok(())
    }

    pub fn is_oblivious(&self) -> bool {
        !matches!(self, Adversary::AdaptivePunisher)
    }

    /// `f_t` for the round following `history`.
    pub fn choose<R: Rng + ?Sized>(
        &self,
        class: &FunctionClass<S>,
        history: &History<S>,
        rng: &mut R,
    ) -> usize {
        match self {
            Adversary::FixedSequence { sequence } => sequence[history.rounds()],
            Adversary::IidMixture { weights } => sample_index(weights, rng),
            Adversary::AdaptivePunisher => match history.modal_arm() {
                None => 0,
                Some(arm) => {
                    let mut best = 0;
                    for (f, row) in class.means().iter().enumerate() {
                        if row[arm] < class.means()[best][arm] {
                            best = f;
                        }
                    }
                    best
                }
            },
            Adversary::LowerBoundPair { delta, sign } => {
                let half = S::of(0.5);
                let p_first = match sign {
                    Sign::Plus => half + *delta,
                    Sign::Minus => half - *delta,
                };
                if S::of(rng.gen::<f64>()) < p_first {
                    0
                } else {
                    1
                }
            }
        }
    }
}

/// Reads newline-separated function indices; blank lines are skipped.
pub fn load_sequence(path: &Path) -> Result<Vec<usize>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .map(|(i, l)| (i, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            l.parse::<usize>().map_err(|e| Error::Config {
                path: format!("{}:{}", path.display(), i + 1),
                message: format!("`{l}` is not a function index: {e}"),
            })
        })
        .collect()
}

pub fn adaptive_punisher<S: Scalar>(class: &FunctionClass<S>) -> Result<Adversary<S>> {
    if class.n_functions() == 0 {
        return Err(Error::param("empty class"));
    }
    Ok(Adversary::AdaptivePunisher)
}
