use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// How a horizon-dependent threshold is picked from a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TuneRule {
    /// Smallest grid threshold with `alpha > g(alpha, T)`; falls back to
    /// [`TuneRule::MinimizeBound`] when no grid point qualifies.
    #[default]
    SmallestAdmissible,
    /// Grid threshold minimizing `alpha + g(alpha, T)`.
    MinimizeBound,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaChoice<S: Scalar = f64> {
    pub alpha: S,
    pub gamma: S,
    /// Estimation term `g(alpha, T)` at the chosen threshold.
    pub estimation: S,
    /// Number of sampled arms `(2 / gamma) ln T` behind `estimation`.
    pub sampled_arms: S,
}

/// `g(alpha, T) = 2 sqrt(m ln m / T)` with `m = (2 / gamma) ln T`.
///
/// Infinite when `gamma` is zero. `ln m` is clamped at zero: with at most one
/// sampled arm there is nothing left to learn.
pub fn estimation_term<S: Scalar>(gamma: S, horizon: usize) -> (S, S) {
    if !(gamma > S::zero()) {
        return (S::infinity(), S::infinity());
    }
    let t = S::of_usize(horizon);
    let m = S::of(2.0) / gamma * t.ln();
    let log_m = m.ln().max(S::zero());
    ((S::of(2.0) * (m * log_m / t).sqrt()), m)
}

pub fn tune_alpha<S: Scalar>(
    gamma_at: impl Fn(S) -> S,
    horizon: usize,
    grid: &[S],
) -> Result<AlphaChoice<S>> {
    tune_alpha_with(gamma_at, horizon, grid, TuneRule::default())
}

pub fn tune_alpha_with<S: Scalar>(
    gamma_at: impl Fn(S) -> S,
    horizon: usize,
    grid: &[S],
    rule: TuneRule,
) -> Result<AlphaChoice<S>> {
    if grid.is_empty() {
        return Err(Error::param("alpha grid is empty"));
    }
    if horizon == 0 {
        return Err(Error::param("horizon must be positive"));
    }
    if grid.iter().any(|a| !(*a > S::zero() && *a < S::one()))
        || grid.windows(2).any(|w| !(w[0] < w[1]))
    {
        return Err(Error::param(
            "alpha grid must be strictly increasing inside (0, 1)",
        ));
    }
    let choices: Vec<AlphaChoice<S>> = grid
        .iter()
        .map(|&alpha| {
            let gamma = gamma_at(alpha);
            let (estimation, sampled_arms) = estimation_term(gamma, horizon);
            AlphaChoice {
                alpha,
                gamma,
                estimation,
                sampled_arms,
            }
        })
        .collect();
    if choices.iter().all(|c| !(c.gamma > S::zero())) {
        return Err(Error::NotLearnable(format!(
            "maximin volume is zero at all {} grid thresholds",
            grid.len()
        )));
    }
    if rule == TuneRule::SmallestAdmissible {
        if let Some(c) = choices.iter().find(|c| c.alpha > c.estimation) {
            return Ok(*c);
        }
    }
    let best = choices
        .iter()
        .filter(|c| c.estimation.is_finite())
        .min_by(|a, b| {
            (a.alpha + a.estimation)
                .partial_cmp(&(b.alpha + b.estimation))
                .expect("finite")
        })
        .expect("some grid point has positive volume");
    Ok(*best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn percent_grid() -> Vec<f64> {
        (1..100).map(|i| i as f64 / 100.0).collect()
    }

    #[test]
    fn constant_volume_picks_smallest_admissible() {
        let t = 1_000_000;
        // Oracle: g = 2 sqrt((2/γ)(ln T) ln((2/γ) ln T) / T) evaluated directly.
        let ln_t = (t as f64).ln();
        let g = 2.0 * ((2.0 * ln_t * (2.0 * ln_t).ln()) / t as f64).sqrt();
        let expected = percent_grid().into_iter().find(|a| *a > g).unwrap();
        let c = tune_alpha(|_| 1.0, t, &percent_grid()).unwrap();
        assert_eq!(c.alpha, expected);
        assert!((c.estimation - g).abs() < 1e-15);
        assert!(c.estimation < 0.05);
        assert_eq!(c.alpha, 0.02);
    }

    #[test]
    fn zero_volume_region_is_skipped() {
        let c = tune_alpha(
            |a| if a < 0.5 { 0.0 } else { 1.0 },
            1 << 40,
            &percent_grid(),
        )
        .unwrap();
        assert!(c.alpha >= 0.5);
    }

    #[test]
    fn singleton_grid() {
        let c = tune_alpha(|_| 0.2, 100, &[0.3]).unwrap();
        assert_eq!(c.alpha, 0.3);
        let c = tune_alpha_with(|_| 0.2, 100, &[0.3], TuneRule::MinimizeBound).unwrap();
        assert_eq!(c.alpha, 0.3);
    }

    #[test]
    fn minimize_bound_rule_can_prefer_smaller_alpha() {
        let c =
            tune_alpha_with(|_| 1.0, 1_000_000, &percent_grid(), TuneRule::MinimizeBound).unwrap();
        assert_eq!(c.alpha, 0.01);
    }

    #[test]
    fn all_zero_is_not_learnable() {
        assert!(matches!(
            tune_alpha(|_| 0.0, 100, &[0.1, 0.2]),
            Err(Error::NotLearnable(_))
        ));
    }

    #[test]
    fn bad_grids() {
        assert!(tune_alpha(|_| 1.0, 10, &[] as &[f64]).is_err());
        assert!(tune_alpha(|_| 1.0, 10, &[0.3, 0.2]).is_err());
        assert!(tune_alpha(|_| 1.0, 10, &[0.0, 0.2]).is_err());
        assert!(tune_alpha(|_| 1.0, 10, &[0.2, 1.0]).is_err());
    }
}
