use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Mean-preserving reward noise on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound = "S: Scalar")]
pub enum NoiseModel<S: Scalar = f64> {
    /// Reward equals the mean.
    Deterministic,
    /// Reward is 1 with probability equal to the mean, else 0.
    Bernoulli,
    /// Reward is `a` with probability `(b − μ)/(b − a)`, else `b`.
    TwoPoint { a: S, b: S },
}

impl<S: Scalar> Default for NoiseModel<S> {
    fn default() -> Self {
        NoiseModel::TwoPoint {
            a: S::zero(),
            b: S::one(),
        }
    }
}

impl<S: Scalar> NoiseModel<S> {
    pub fn validate(&self) -> Result<()> {
        if let NoiseModel::TwoPoint { a, b } = *self {
            if !(S::zero() <= a && a <= b && b <= S::one()) {
                return Err(Error::param(format!(
                    "two-point noise needs 0 ≤ a ≤ b ≤ 1, got a = {a}, b = {b}"
                )));
            }
        }
        Ok(())
    }

    pub fn emit<R: Rng + ?Sized>(&self, mean: S, rng: &mut R) -> Result<S> {
        if !(mean >= S::zero() && mean <= S::one()) {
            return Err(Error::param(format!("mean {mean} outside [0, 1]")));
        }
        match *self {
            NoiseModel::Deterministic => Ok(mean),
            NoiseModel::Bernoulli => Ok(if S::of(rng.gen::<f64>()) < mean {
                S::one()
            } else {
                S::zero()
            }),
            NoiseModel::TwoPoint { a, b } => {
                if !(a <= mean && mean <= b) {
                    return Err(Error::param(format!(
                        "mean {mean} outside the two-point support [{a}, {b}]"
                    )));
                }
                if a == b {
                    return Ok(a);
                }
                let weight_a = (b - mean) / (b - a);
                Ok(if S::of(rng.gen::<f64>()) < weight_a {
                    a
                } else {
                    b
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};

    #[test]
    fn empirical_means_match() {
        let models = [
            NoiseModel::Deterministic,
            NoiseModel::Bernoulli,
            NoiseModel::TwoPoint { a: 0.0, b: 1.0 },
        ];
        let n = 1_000_000;
        for (k, model) in models.iter().enumerate() {
            for mu in [0.0, 0.3, 0.5, 1.0] {
                let mut rng = stream(k as u64, Purpose::Noise);
                let (mut s, mut s2) = (0.0f64, 0.0f64);
                for _ in 0..n {
                    let r = model.emit(mu, &mut rng).unwrap();
                    assert!((0.0..=1.0).contains(&r));
                    s += r;
                    s2 += r * r;
                }
                let mean = s / n as f64;
                let se = ((s2 / n as f64 - mean * mean).max(0.0) / n as f64).sqrt();
                assert!(
                    (mean - mu).abs() <= 3.0 * se + 1e-12,
                    "{model:?} μ={mu}: {mean}"
                );
            }
        }
    }

    #[test]
    fn narrow_two_point() {
        let m = NoiseModel::TwoPoint { a: 0.25, b: 0.75 };
        let mut rng = stream(3, Purpose::Noise);
        let n = 400_000;
        let mean: f64 = (0..n).map(|_| m.emit(0.4, &mut rng).unwrap()).sum::<f64>() / n as f64;
        // σ ≤ 0.25, so 3σ/√n < 1.2e-3.
        assert!((mean - 0.4).abs() < 1.2e-3);
        assert!(m.emit(0.1, &mut rng).is_err());
        assert!(NoiseModel::TwoPoint { a: 0.8, b: 0.2 }.validate().is_err());
    }

    #[test]
    fn degenerate_bernoulli() {
        let mut rng = stream(4, Purpose::Noise);
        assert!((0..1000).all(|_| NoiseModel::Bernoulli.emit(1.0, &mut rng).unwrap() == 1.0));
    }

    #[test]
    fn config_shape() {
        let m: NoiseModel =
            serde_json::from_str(r#"{"kind": "two_point", "a": 0.1, "b": 0.9}"#).unwrap();
        assert_eq!(m, NoiseModel::TwoPoint { a: 0.1, b: 0.9 });
        let m: NoiseModel = serde_json::from_str(r#"{"kind": "bernoulli"}"#).unwrap();
        assert_eq!(m, NoiseModel::Bernoulli);
    }
}
