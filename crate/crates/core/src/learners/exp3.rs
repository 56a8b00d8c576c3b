use crate::error::{Error, Result};
use crate::model::ArmDistribution;
use crate::scalar::Scalar;

/// `sqrt(ln K / (T K))`. A single arm needs no learning and gets rate zero.
pub fn exp3_default_eta<S: Scalar>(n_arms: usize, horizon: usize) -> Result<S> {
    if n_arms == 0 {
        return Err(Error::param("Exp3 needs at least one arm"));
    }
    if horizon == 0 {
        return Err(Error::param("horizon must be positive"));
    }
    if n_arms == 1 {
        return Ok(S::zero());
    }
    let k = S::of_usize(n_arms);
    Ok((k.ln() / (S::of_usize(horizon) * k)).sqrt())
}

/// Exp3 with importance-weighted reward estimates.
///
/// `s_hat` holds raw cumulative estimates; only their differences matter.
#[derive(Debug, Clone, PartialEq)]
pub struct Exp3State<S: Scalar = f64> {
    eta: S,
    s_hat: Vec<S>,
    t: usize,
}

impl<S: Scalar> Exp3State<S> {
    pub fn new(n_arms: usize, eta: S) -> Result<Self> {
        if n_arms == 0 {
            return Err(Error::param("Exp3 needs at least one arm"));
        }
        if !(eta >= S::zero()) || !eta.is_finite() {
            return Err(Error::param(format!(
                "learning rate {eta} must be finite and non-negative"
            )));
        }
        Ok(Self {
            eta,
            s_hat: vec![S::zero(); n_arms],
            t: 0,
        })
    }

    pub fn from_estimates(s_hat: Vec<S>, eta: S) -> Result<Self> {
        let mut state = Self::new(s_hat.len(), eta)?;
        if s_hat.iter().any(|s| !s.is_finite()) {
            return Err(Error::param("estimates must be finite"));
        }
        state.s_hat = s_hat;
        Ok(state)
    }

    pub fn n_arms(&self) -> usize {
        self.s_hat.len()
    }

    pub fn eta(&self) -> S {
        self.eta
    }

    pub fn estimates(&self) -> &[S] {
        &self.s_hat
    }

    pub fn round(&self) -> usize {
        self.t
    }

    /// Softmax of `eta * s_hat`, shifted by the maximum.
    pub fn probabilities(&self) -> ArmDistribution<S> {
        let mut out = Vec::with_capacity(self.s_hat.len());
        self.probabilities_into(&mut out);
        ArmDistribution::from_weights(out).expect("softmax weights are positive")
    }

    pub(crate) fn probabilities_into(&self, out: &mut Vec<S>) {
        out.clear();
        let top = self.s_hat.iter().copied().fold(S::neg_infinity(), S::max);
        out.extend(self.s_hat.iter().map(|s| (self.eta * (*s - top)).exp()));
        let total: S = out.iter().copied().sum();
        for p in out.iter_mut() {
            *p = *p / total;
        }
    }

    /// `s_hat_i += 1 − 1[i = chosen] (1 − reward) / p_i`.
    pub fn update(&mut self, chosen: usize, prob: S, reward: S) -> Result<()> {
        if chosen >= self.s_hat.len() {
            return Err(Error::Index {
                what: "Exp3 arms",
                index: chosen,
                len: self.s_hat.len(),
            });
        }
        if !(reward >= S::zero() && reward <= S::one()) {
            return Err(Error::param(format!("reward {reward} outside [0, 1]")));
        }
        if !(prob > S::zero()) {
            return Err(Error::param(format!("chosen arm had probability {prob}")));
        }
        for s in self.s_hat.iter_mut() {
            *s = *s + S::one();
        }
        self.s_hat[chosen] = self.s_hat[chosen] - (S::one() - reward) / prob;
        self.t += 1;
        Ok(())
    }

    /// Functional form of [`Exp3State::update`], with the probability taken
    /// from the current state.
    pub fn updated(&self, chosen: usize, reward: S) -> Result<Self> {
        let probs = self.probabilities();
        let prob = *probs.probs().get(chosen).ok_or(Error::Index {
            what: "Exp3 arms",
            index: chosen,
            len: self.s_hat.len(),
        })?;
        let mut next = self.clone();
        next.update(chosen, prob, reward)?;
        Ok(next)
    }
}

pub fn exp3_probabilities<S: Scalar>(state: &Exp3State<S>) -> ArmDistribution<S> {
    state.probabilities()
}

pub fn exp3_update<S: Scalar>(
    state: &Exp3State<S>,
    chosen: usize,
    reward: S,
) -> Result<Exp3State<S>> {
    state.updated(chosen, reward)
}
