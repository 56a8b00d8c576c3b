//! Generalized maximin volume.
//!
//! For a threshold `alpha`, the volume of a class is the value of the 0/1
//! game whose payoff is 1 when the arm drawn from `p` lies in the
//! function's good region:
//!
//! ```text
//! gamma(F, alpha) = max_p min_f P_{a~p}( sup f − f(a) ≤ alpha )
//! ```
//!
//! Because the payoff is linear in the function player's mixed strategy, the
//! inner infimum over pure functions equals the one over mixed strategies and
//! the matrix-game value is exact. The convexified volume replaces `F` by its
//! convex hull; good regions of mixtures are recomputed from the mixed values,
//! so it is approximated by restricting the hull to a simplex grid.

mod game;
mod mask;
mod tune;

pub use game::{
    solve, solve_exact, solve_mwu, solve_row_generation, DenseGame, GameSolution, RowOracle,
    SolveOptions, Solver, EXACT_DIRECT_LIMIT,
};
pub use mask::{good_region, good_region_of, GoodRegionMask, MaskGame};
pub use tune::{tune_alpha, tune_alpha_with, AlphaChoice, TuneRule};

use crate::error::{Error, Result};
use crate::learners::Learner;
use crate::model::{ArmDistribution, FunctionClass};
use crate::rng::{stream, trial_seed, Purpose};
use crate::scalar::Scalar;
use rand::Rng;

use mask::check_alpha;

pub fn gamma<S: Scalar>(class: &FunctionClass<S>, alpha: S) -> Result<GameSolution<S>> {
    gamma_with(class, alpha, &SolveOptions::default())
}

pub fn gamma_with<S: Scalar>(
    class: &FunctionClass<S>,
    alpha: S,
    opts: &SolveOptions,
) -> Result<GameSolution<S>> {
    let mask = good_region(class, alpha)?;
    let game = MaskGame::new(class.n_arms(), mask.mask);
    let packed = solve(&game, opts)?;
    // Spread each deduplicated row's dual mass back onto its first function.
    let mut dual = vec![S::zero(); class.n_functions()];
    for (owners, w) in game.owners().iter().zip(&packed.dual_witness) {
        dual[owners[0]] = *w;
    }
    Ok(GameSolution {
        dual_witness: dual,
        ..packed
    })
}

/// Default cap on the number of simplex-grid mixtures.
pub const DEFAULT_GRID_CAP: u128 = 5_000_000;

#[derive(Debug, Clone, Copy)]
pub struct ConvexOptions {
    pub grid_resolution: usize,
    pub max_mixtures: u128,
    pub solve: SolveOptions,
}

impl Default for ConvexOptions {
    fn default() -> Self {
        Self {
            grid_resolution: 2,
            max_mixtures: DEFAULT_GRID_CAP,
            solve: SolveOptions::default(),
        }
    }
}

impl ConvexOptions {
    pub fn with_resolution(grid_resolution: usize) -> Self {
        Self {
            grid_resolution,
            ..Default::default()
        }
    }
}

/// Volume of the simplex-grid restriction of the convex hull.
///
/// The function player only has grid mixtures available, so `value` is an
/// upper bound on the convexified volume (`upper_bound` is always set).
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexGameSolution<S: Scalar = f64> {
    pub value: S,
    pub witness: ArmDistribution<S>,
    /// Minimizer support as `(mixture weights, probability)` pairs.
    pub dual_support: Vec<(Vec<S>, S)>,
    pub duality_gap: S,
    pub grid_resolution: usize,
    pub n_mixtures: usize,
    pub upper_bound: bool,
}

pub fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n.saturating_sub(k));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Number of points `{λ : λ_i = k_i / r, Σ k_i = r}` on the simplex grid.
pub fn grid_size(n_functions: usize, resolution: usize) -> u128 {
    binomial((n_functions + resolution - 1) as u128, resolution as u128)
}

/// Visits every grid mixture as a sparse list of `(function, count)` pairs
/// with counts summing to `resolution`, in lexicographic multiset order.
pub fn for_each_grid_mixture(
    n_functions: usize,
    resolution: usize,
    mut visit: impl FnMut(&[(usize, usize)]),
) {
    if n_functions == 0 || resolution == 0 {
        return;
    }
    let mut picks = vec![0usize; resolution];
    let mut sparse: Vec<(usize, usize)> = Vec::with_capacity(resolution);
    loop {
        sparse.clear();
        for &f in &picks {
            match sparse.last_mut() {
                Some((g, c)) if *g == f => *c += 1,
                _ => sparse.push((f, 1)),
            }
        }
        visit(&sparse);
        // Advance the non-decreasing index sequence.
        let Some(pos) = (0..resolution).rev().find(|&i| picks[i] + 1 < n_functions) else {
            return;
        };
        let next = picks[pos] + 1;
        for p in picks[pos..].iter_mut() {
            *p = next;
        }
    }
}

/// Pointwise values of a sparse grid mixture.
pub fn grid_mixture_values<S: Scalar>(
    class: &FunctionClass<S>,
    sparse: &[(usize, usize)],
    resolution: usize,
) -> Vec<S> {
    let r = S::of_usize(resolution);
    let mut out = vec![S::zero(); class.n_arms()];
    for &(f, c) in sparse {
        let c = S::of_usize(c);
        for (o, v) in out.iter_mut().zip(&class.means()[f]) {
            *o = *o + c * *v;
        }
    }
    for o in out.iter_mut() {
        *o = *o / r;
    }
    out
}

/// Materializes every grid mixture as a function of its own.
pub fn convex_grid_class<S: Scalar>(
    class: &FunctionClass<S>,
    resolution: usize,
    max_mixtures: u128,
) -> Result<FunctionClass<S>> {
    check_grid(class, resolution, max_mixtures)?;
    let mut rows = Vec::new();
    for_each_grid_mixture(class.n_functions(), resolution, |sparse| {
        rows.push(
            grid_mixture_values(class, sparse, resolution)
                .into_iter()
                .map(|v| v.min(S::one()))
                .collect(),
        );
    });
    FunctionClass::with_arms(class.arms().clone(), rows)
}

fn check_grid<S: Scalar>(
    class: &FunctionClass<S>,
    resolution: usize,
    max_mixtures: u128,
) -> Result<usize> {
    if resolution == 0 {
        return Err(Error::param("grid resolution must be at least 1"));
    }
    let size = grid_size(class.n_functions(), resolution);
    if size > max_mixtures {
        return Err(Error::Resource(format!(
            "simplex grid with {} functions at resolution {resolution} has {size} mixtures \
             (cap {max_mixtures}); use fewer functions or a coarser grid",
            class.n_functions()
        )));
    }
    Ok(size as usize)
}

pub fn gamma_convex<S: Scalar>(
    class: &FunctionClass<S>,
    alpha: S,
    opts: &ConvexOptions,
) -> Result<ConvexGameSolution<S>> {
    check_alpha(alpha)?;
    let resolution = opts.grid_resolution;
    let n_mixtures = check_grid(class, resolution, opts.max_mixtures)?;

    let mut mixtures: Vec<Vec<(usize, usize)>> = Vec::with_capacity(n_mixtures);
    let mut masks = Vec::with_capacity(n_mixtures);
    for_each_grid_mixture(class.n_functions(), resolution, |sparse| {
        let values = grid_mixture_values(class, sparse, resolution);
        masks.push(good_region_of(&values, alpha).0);
        mixtures.push(sparse.to_vec());
    });
    let game = MaskGame::new(class.n_arms(), masks);
    let sol = solve(&game, &opts.solve)?;

    let r = S::of_usize(resolution);
    let dual_support = game
        .owners()
        .iter()
        .zip(&sol.dual_witness)
        .filter(|(_, w)| **w > S::zero())
        .map(|(owners, w)| {
            let mut weights = vec![S::zero(); class.n_functions()];
            for &(f, c) in &mixtures[owners[0]] {
                weights[f] = S::of_usize(c) / r;
            }
            (weights, *w)
        })
        .collect();
    Ok(ConvexGameSolution {
        value: sol.value,
        witness: sol.witness,
        dual_support,
        duality_gap: sol.duality_gap,
        grid_resolution: resolution,
        n_mixtures,
        upper_bound: true,
    })
}

/// Pooled pull frequencies of a learner fed i.i.d. Bernoulli(1/2) rewards.
///
/// Drawing a uniformly random round of a uniformly random trial gives an arm
/// with exactly this distribution.
pub fn empirical_witness<S, L, M>(
    make_learner: M,
    n_arms: usize,
    horizon: usize,
    trials: usize,
    seed: u64,
) -> Result<ArmDistribution<S>>
where
    S: Scalar,
    L: Learner<S>,
    M: Fn(u64) -> Result<L>,
{
    if horizon == 0 {
        return Err(Error::param("horizon must be positive"));
    }
    if trials == 0 {
        return Err(Error::param("need at least one trial"));
    }
    let mut counts = vec![0u64; n_arms];
    for trial in 0..trials {
        let trial_seed = trial_seed(seed, horizon as u64, trial as u64);
        let mut learner = make_learner(trial_seed)?;
        let mut noise = stream(trial_seed, Purpose::Noise);
        for _ in 0..horizon {
            let arm = learner.select();
            *counts.get_mut(arm).ok_or(Error::Index {
                what: "arm space",
                index: arm,
                len: n_arms,
            })? += 1;
            let reward = if noise.gen::<bool>() {
                S::one()
            } else {
                S::zero()
            };
            learner.observe(reward)?;
        }
    }
    ArmDistribution::from_weights(counts.into_iter().map(|c| S::of(c as f64)).collect())
}
