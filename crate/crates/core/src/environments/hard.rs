use crate::error::{Error, Result};
use crate::model::FunctionClass;
use crate::scalar::Scalar;

use super::adversary::{Adversary, Sign};

/// Arm counts of the lower-bound layout: arms `0..s1` form `S₁`, the next
/// `s2` arms form `S₂`, and `others` arms belong to neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ArmLayout {
    pub s1: usize,
    pub s2: usize,
    pub others: usize,
}

impl ArmLayout {
    pub fn n_arms(&self) -> usize {
        self.s1 + self.s2 + self.others
    }
}

/// Two binary functions with disjoint good regions, mixed with
/// probabilities `1/2 ± delta` each round.
#[derive(Debug, Clone, PartialEq)]
pub struct HardInstance<S: Scalar = f64> {
    pub class: FunctionClass<S>,
    pub delta: S,
    pub sign: Sign,
}

impl<S: Scalar> HardInstance<S> {
    /// `delta = 1 / (8 sqrt(2T))`.
    pub fn auto_delta(horizon: usize) -> S {
        S::one() / (S::of(8.0) * (S::of(2.0) * S::of_usize(horizon)).sqrt())
    }

    pub fn from_sets(
        n_arms: usize,
        s1: &[usize],
        s2: &[usize],
        delta: S,
        sign: Sign,
    ) -> Result<Self> {
        if s1.is_empty() || s2.is_empty() {
            return Err(Error::param("both good regions need at least one arm"));
        }
        if let Some(a) = s1.iter().chain(s2).find(|a| **a >= n_arms) {
            return Err(Error::Index {
                what: "arm space",
                index: *a,
                len: n_arms,
            });
        }
        if let Some(a) = s1.iter().find(|a| s2.contains(a)) {
            return Err(Error::structural(format!(
                "arm {a} is in both good regions"
            )));
        }
        if !(delta > S::zero() && delta <= S::of(0.25)) {
            return Err(Error::param(format!("delta {delta} outside (0, 1/4]")));
        }
        let indicator = |set: &[usize]| -> Vec<S> {
            (0..n_arms)
                .map(|a| {
                    if set.contains(&a) {
                        S::one()
                    } else {
                        S::zero()
                    }
                })
                .collect()
        };
        Ok(Self {
            class: FunctionClass::new(vec![indicator(s1), indicator(s2)])?,
            delta,
            sign,
        })
    }

    pub fn adversary(&self) -> Adversary<S> {
        Adversary::LowerBoundPair {
            delta: self.delta,
            sign: self.sign,
        }
    }

    /// Per-round mean reward of each arm averaged over the function draw.
    pub fn mean_rewards(&self) -> Vec<S> {
        let half = S::of(0.5);
        let p_first = match self.sign {
            Sign::Plus => half + self.delta,
            Sign::Minus => half - self.delta,
        };
        self.class.combine(&[p_first, S::one() - p_first])
    }
}

pub fn hard_instance_env<S: Scalar>(
    horizon: usize,
    layout: ArmLayout,
    sign: Sign,
) -> Result<(Adversary<S>, FunctionClass<S>)> {
    let inst = hard_instance(horizon, layout, sign)?;
    Ok((inst.adversary(), inst.class))
}

pub fn hard_instance<S: Scalar>(
    horizon: usize,
    layout: ArmLayout,
    sign: Sign,
) -> Result<HardInstance<S>> {
    if horizon == 0 {
        return Err(Error::param("horizon must be positive"));
    }
    let s1: Vec<usize> = (0..layout.s1).collect();
    let s2: Vec<usize> = (layout.s1..layout.s1 + layout.s2).collect();
    HardInstance::from_sets(
        layout.n_arms(),
        &s1,
        &s2,
        HardInstance::auto_delta(horizon),
        sign,
    )
}

/// `(3 / (32 sqrt 2)) sqrt(T)`.
pub fn lower_bound_threshold(horizon: usize) -> f64 {
    3.0 / (32.0 * 2f64.sqrt()) * (horizon as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct KlBudget {
    /// `KL(1/2 + Δ ‖ 1/2 − Δ)` in nats.
    pub kl: f64,
    /// `16 Δ²`.
    pub kl_bound: f64,
    /// Pinsker bound `sqrt(t · KL / 2)` on the total variation after `t` rounds.
    pub tv_pinsker: f64,
    /// `Δ sqrt(8t)`.
    pub tv_proxy: f64,
    pub holds: bool,
}

pub fn kl_budget_check(delta: f64, rounds: usize) -> Result<KlBudget> {
    if !(0.0..=0.25).contains(&delta) {
        return Err(Error::param(format!(
            "delta {delta} outside [0, 1/4], where the KL bound is valid"
        )));
    }
    let (hi, lo) = (0.5 + delta, 0.5 - delta);
    let kl = if delta == 0.0 {
        0.0
    } else {
        hi * (hi / lo).ln() + lo * (lo / hi).ln()
    };
    let kl_bound = 16.0 * delta * delta;
    let tv_pinsker = (rounds as f64 * kl / 2.0).sqrt();
    let tv_proxy = delta * (8.0 * rounds as f64).sqrt();
    Ok(KlBudget {
        kl,
        kl_bound,
        tv_pinsker,
        tv_proxy,
        holds: kl <= kl_bound && tv_pinsker <= tv_proxy,
    })
}
