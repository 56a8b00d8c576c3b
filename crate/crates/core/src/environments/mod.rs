//! Noise, adversaries and the interaction loop.
//!
//! Each round follows the same order: the adversary commits to `f_t` from the
//! history of previous rounds, the learner picks an arm, and the noise model
//! emits a reward whose mean is `f_t(arm)`.

mod adversary;
mod hard;
mod noise;

pub use adversary::{adaptive_punisher, load_sequence, Adversary, History, Sign};
pub use hard::{
    hard_instance, hard_instance_env, kl_budget_check, lower_bound_threshold, ArmLayout,
    HardInstance, KlBudget,
};
pub use noise::NoiseModel;

use crate::error::{Error, Result};
use crate::learners::Learner;
use crate::model::{FunctionClass, Trace};
use crate::rng::{stream, Purpose};
use crate::scalar::Scalar;

pub fn simulate<S: Scalar, L: Learner<S> + ?Sized>(
    learner: &mut L,
    adversary: &Adversary<S>,
    noise: &NoiseModel<S>,
    class: &FunctionClass<S>,
    horizon: usize,
    seed: u64,
) -> Result<Trace<S>> {
    if learner.n_arms() != class.n_arms() {
        return Err(Error::structural(format!(
            "learner plays {} arms but the class has {}",
            learner.n_arms(),
            class.n_arms()
        )));
    }
    adversary.validate(class, horizon)?;
    noise.validate()?;

    let mut adversary_rng = stream(seed, Purpose::Adversary);
    let mut noise_rng = stream(seed, Purpose::Noise);
    let mut history = History::new(class.n_arms());
    for _ in 0..horizon {
        let f = adversary.choose(class, &history, &mut adversary_rng);
        let arm = learner.select();
        if arm >= class.n_arms() {
            return Err(Error::Index {
                what: "arm space",
                index: arm,
                len: class.n_arms(),
            });
        }
        let reward = noise.emit(class.means()[f][arm], &mut noise_rng)?;
        learner.observe(reward)?;
        history.push(f, arm, reward);
    }
    Trace::new(history.arms, history.rewards, history.functions, seed)
}
