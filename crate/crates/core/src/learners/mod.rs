//! Exp3 and the learners built on it.
//!
//! * sampled arms: draw `m = ⌈(2/γ) ln T⌉` arms from a maximin witness and
//!   run Exp3 on them (duplicates kept as separate Exp3 arms);
//! * hitting set: Exp3 over a finite α-hitting set;
//! * distribution cover: Exp3 over meta-arms, each meta-arm a distribution
//!   that is sampled to produce the played arm.

mod exp3;

pub use exp3::{exp3_default_eta, exp3_probabilities, exp3_update, Exp3State};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::covers::{DistributionCover, HittingSet};
use crate::error::{Error, Result};
use crate::model::ArmDistribution;
use crate::rng::{sample_index, stream, Purpose, StreamRng};
use crate::scalar::Scalar;

/// Round-by-round bandit learner: one [`Learner::select`] then one
/// [`Learner::observe`] per round.
pub trait Learner<S: Scalar> {
    /// Size of the arm space the learner plays in.
    fn n_arms(&self) -> usize;

    /// Arm for the current round. Calling again before `observe` returns the
    /// same arm.
    fn select(&mut self) -> usize;

    fn observe(&mut self, reward: S) -> Result<()>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    Exp3,
    Alg1,
    Alg2,
    Alg3,
    UniformBaseline,
    FixedArm,
}

/// Exp3 over a list of arms (possibly with repeats).
#[derive(Debug, Clone)]
struct Exp3Over<S: Scalar> {
    state: Exp3State<S>,
    arms: Vec<usize>,
    rng: StreamRng,
    probs: Vec<S>,
    pending: Option<usize>,
}

impl<S: Scalar> Exp3Over<S> {
    fn new(arms: Vec<usize>, horizon: usize, eta: Option<S>, seed: u64) -> Result<Self> {
        let eta = match eta {
            Some(e) => e,
            None => exp3_default_eta(arms.len(), horizon)?,
        };
        Ok(Self {
            state: Exp3State::new(arms.len(), eta)?,
            arms,
            rng: stream(seed, Purpose::Learner),
            probs: Vec::new(),
            pending: None,
        })
    }

    fn select_index(&mut self) -> usize {
        if let Some(i) = self.pending {
            return i;
        }
        self.state.probabilities_into(&mut self.probs);
        let i = sample_index(&self.probs, &mut self.rng);
        self.pending = Some(i);
        i
    }

    fn observe(&mut self, reward: S) -> Result<()> {
        let i = self
            .pending
            .take()
            .ok_or_else(|| Error::structural("reward observed before an arm was selected"))?;
        self.state.update(i, self.probs[i], reward)
    }
}

#[derive(Debug, Clone)]
enum Inner<S: Scalar> {
    Exp3(Exp3Over<S>),
    Cover {
        meta: Exp3Over<S>,
        dists: Vec<ArmDistribution<S>>,
        draw: StreamRng,
        played: Option<usize>,
    },
    Uniform {
        rng: StreamRng,
        pending: Option<usize>,
    },
    Fixed {
        arm: usize,
        pending: bool,
    },
}

/// Any learner the toolkit can build, behind one interface.
#[derive(Debug, Clone)]
pub struct LearnerHandle<S: Scalar = f64> {
    kind: LearnerKind,
    n_arms: usize,
    inner: Inner<S>,
}

impl<S: Scalar> LearnerHandle<S> {
    pub fn kind(&self) -> LearnerKind {
        self.kind
    }

    /// Arms (or meta-arms) Exp3 runs on; `None` for the baselines.
    pub fn exp3_arms(&self) -> Option<usize> {
        match &self.inner {
            Inner::Exp3(e) => Some(e.arms.len()),
            Inner::Cover { meta, .. } => Some(meta.arms.len()),
            _ => None,
        }
    }

    /// Arms Exp3 was restricted to (sampled arms, hitting set, or all arms).
    pub fn support(&self) -> Option<&[usize]> {
        match &self.inner {
            Inner::Exp3(e) => Some(&e.arms),
            _ => None,
        }
    }

    pub fn exp3_state(&self) -> Option<&Exp3State<S>> {
        match &self.inner {
            Inner::Exp3(e) => Some(&e.state),
            Inner::Cover { meta, .. } => Some(&meta.state),
            _ => None,
        }
    }

    /// Plain Exp3 on all arms.
    pub fn exp3(n_arms: usize, horizon: usize, eta: Option<S>, seed: u64) -> Result<Self> {
        Ok(Self {
            kind: LearnerKind::Exp3,
            n_arms,
            inner: Inner::Exp3(Exp3Over::new((0..n_arms).collect(), horizon, eta, seed)?),
        })
    }

    pub fn uniform(n_arms: usize, seed: u64) -> Result<Self> {
        if n_arms == 0 {
            return Err(Error::param("uniform baseline needs at least one arm"));
        }
        Ok(Self {
            kind: LearnerKind::UniformBaseline,
            n_arms,
            inner: Inner::Uniform {
                rng: stream(seed, Purpose::Baseline),
                pending: None,
            },
        })
    }

    pub fn fixed(n_arms: usize, arm: usize) -> Result<Self> {
        if arm >= n_arms {
            return Err(Error::Index {
                what: "arm space",
                index: arm,
                len: n_arms,
            });
        }
        Ok(Self {
            kind: LearnerKind::FixedArm,
            n_arms,
            inner: Inner::Fixed {
                arm,
                pending: false,
            },
        })
    }
}

/// Number of arms the sampled-arm learner draws: `max(1, ⌈(2/γ) ln T⌉)`.
///
/// `horizon` is real-valued here so the count can be evaluated off the
/// integer grid.
pub fn sampled_arm_count<S: Scalar>(gamma_value: S, horizon: S) -> Result<usize> {
    if !(gamma_value > S::zero()) {
        return Err(Error::NotLearnable(format!(
            "maximin volume {gamma_value} is not positive"
        )));
    }
    if !(horizon >= S::one()) {
        return Err(Error::param("horizon must be at least 1"));
    }
    let m = (S::of(2.0) / gamma_value * horizon.ln()).ceil();
    Ok(m.to_usize().unwrap_or(usize::MAX).max(1))
}

/// Sampled-arm learner: Exp3 on `m` arms drawn i.i.d. from `witness`.
pub fn alg1_make<S: Scalar>(
    gamma_value: S,
    witness: &ArmDistribution<S>,
    horizon: usize,
    seed: u64,
    eta: Option<S>,
) -> Result<LearnerHandle<S>> {
    let m = sampled_arm_count(gamma_value, S::of_usize(horizon))?;
    let mut rng = stream(seed, Purpose::ArmSampling);
    let arms: Vec<usize> = (0..m).map(|_| witness.sample(&mut rng)).collect();
    Ok(LearnerHandle {
        kind: LearnerKind::Alg1,
        n_arms: witness.n_arms(),
        inner: Inner::Exp3(Exp3Over::new(arms, horizon, eta, seed)?),
    })
}

/// Hitting-set learner: Exp3 on the arms of `hitting_set`.
pub fn alg2_make<S: Scalar>(
    hitting_set: &HittingSet<S>,
    n_arms: usize,
    horizon: usize,
    seed: u64,
    eta: Option<S>,
) -> Result<LearnerHandle<S>> {
    if hitting_set.arms.is_empty() {
        return Err(Error::param("hitting set is empty"));
    }
    if let Some(&a) = hitting_set.arms.iter().find(|a| **a >= n_arms) {
        return Err(Error::Index {
            what: "arm space",
            index: a,
            len: n_arms,
        });
    }
    Ok(LearnerHandle {
        kind: LearnerKind::Alg2,
        n_arms,
        inner: Inner::Exp3(Exp3Over::new(hitting_set.arms.clone(), horizon, eta, seed)?),
    })
}

/// Distribution-cover learner: Exp3 over the cover's distributions as
/// meta-arms; the realized reward of the sampled arm feeds the chosen
/// meta-arm.
pub fn alg3_make<S: Scalar>(
    cover: &DistributionCover<S>,
    horizon: usize,
    seed: u64,
    eta: Option<S>,
) -> Result<LearnerHandle<S>> {
    let Some(first) = cover.dists.first() else {
        return Err(Error::param("distribution cover is empty"));
    };
    let n_arms = first.n_arms();
    if cover.dists.iter().any(|d| d.n_arms() != n_arms) {
        return Err(Error::structural(
            "cover distributions disagree on arm count",
        ));
    }
    let meta = Exp3Over::new((0..cover.dists.len()).collect(), horizon, eta, seed)?;
    Ok(LearnerHandle {
        kind: LearnerKind::Alg3,
        n_arms,
        inner: Inner::Cover {
            meta,
            dists: cover.dists.clone(),
            draw: stream(seed, Purpose::MetaArm),
            played: None,
        },
    })
}

impl<S: Scalar> Learner<S> for LearnerHandle<S> {
    fn n_arms(&self) -> usize {
        self.n_arms
    }

    fn select(&mut self) -> usize {
        match &mut self.inner {
            Inner::Exp3(e) => {
                let i = e.select_index();
                e.arms[i]
            }
            Inner::Cover {
                meta,
                dists,
                draw,
                played,
            } => {
                if let Some(a) = *played {
                    return a;
                }
                let i = meta.select_index();
                let a = dists[i].sample(draw);
                *played = Some(a);
                a
            }
            Inner::Uniform { rng, pending } => {
                *pending.get_or_insert_with(|| rng.gen_range(0..self.n_arms))
            }
            Inner::Fixed { arm, pending } => {
                *pending = true;
                *arm
            }
        }
    }

    fn observe(&mut self, reward: S) -> Result<()> {
        if !(reward >= S::zero() && reward <= S::one()) {
            return Err(Error::param(format!("reward {reward} outside [0, 1]")));
        }
        let missing = || Error::structural("reward observed before an arm was selected");
        match &mut self.inner {
            Inner::Exp3(e) => e.observe(reward),
            Inner::Cover { meta, played, .. } => {
                played.take().ok_or_else(missing)?;
                meta.observe(reward)
            }
            Inner::Uniform { pending, .. } => pending.take().map(|_| ()).ok_or_else(missing),
            Inner::Fixed { pending, .. } => {
                if !std::mem::take(pending) {
                    return Err(missing());
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests;
