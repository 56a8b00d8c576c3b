//! Seeded random streams.
//!
//! Every consumer of randomness in a trial draws from its own ChaCha stream,
//! keyed by the trial seed and a [`Purpose`]. ChaCha is counter based, so the
//! value drawn at any round depends only on `(seed, purpose, position)` and
//! never on how other components interleave their draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    /// Exp3 arm (or meta-arm) draws.
    Learner = 1,
    /// Arm sampling from a witness when building the sampled-arm learner.
    ArmSampling = 2,
    /// Drawing an arm from a meta-arm distribution.
    MetaArm = 3,
    Adversary = 4,
    Noise = 5,
    /// Balanced sign draws and candidate generation for counterexamples.
    Construction = 6,
    Baseline = 7,
}

pub type StreamRng = ChaCha8Rng;

pub fn stream(seed: u64, purpose: Purpose) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(purpose as u64);
    rng
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial seed: `base ⊕ hash(horizon, trial)`.
pub fn trial_seed(base: u64, horizon: u64, trial: u64) -> u64 {
    base ^ mix64(mix64(horizon) ^ trial.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// Draws an index from `probs` by inverting the cumulative sum. Falls back to
/// the last positive entry when rounding leaves `u` past the total.
pub fn sample_index<S: Scalar, R: Rng + ?Sized>(probs: &[S], rng: &mut R) -> usize {
    let u = S::of(rng.gen::<f64>());
    let mut acc = S::zero();
    let mut last_positive = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > S::zero() {
            last_positive = i;
        }
        acc = acc + p;
        if u < acc {
            return i;
        }
    }
    last_positive
}
