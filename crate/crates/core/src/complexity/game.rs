//! Zero-sum matrix games.
//!
//! Convention throughout: the *column* player picks a distribution `p` over
//! columns and maximizes; the *row* player picks a distribution `q` over rows
//! and minimizes. The payoff for `(row r, column c)` is `G[r][c]`, so the
//! game value is `max_p min_r Σ_c p_c G[r][c]`.
//!
//! Three solvers are provided:
//!
//! * [`solve_exact`]: dense simplex on the LP dual, for small matrices.
//! * [`solve_row_generation`]: row generation over a [`RowOracle`], solving
//!   restricted games exactly and adding the most violated rows until the
//!   certified gap closes. Handles very tall games (hundreds of thousands of
//!   rows) without materializing them as dense matrices.
//! * [`solve_mwu`]: multiplicative-weights self-play with exact best
//!   responses. Cheap certificates, slow convergence.
//!
//! Every solution carries an independently recomputed duality gap.

use crate::error::{Error, Result};
use crate::model::ArmDistribution;
use crate::scalar::Scalar;

/// Largest matrix (rows and columns) solved directly by [`solve_exact`] under
/// [`Solver::Auto`].
pub const EXACT_DIRECT_LIMIT: usize = 64;

/// Optimal (or certified near-optimal) strategies of a zero-sum game.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSolution<S: Scalar = f64> {
    /// Guaranteed payoff of `witness`: `min_r Σ_c witness_c G[r][c]`.
    pub value: S,
    pub witness: ArmDistribution<S>,
    /// Minimizer strategy over rows.
    pub dual_witness: Vec<S>,
    /// `max_c (qᵀG)_c − min_r (G p)_r`, recomputed from the strategies.
    pub duality_gap: S,
}

/// Source of payoff rows for games too tall to hold densely.
pub trait RowOracle<S: Scalar>: Sync {
    fn n_rows(&self) -> usize;
    fn n_cols(&self) -> usize;

    /// Dense copy of row `r`.
    fn row(&self, r: usize) -> Vec<S>;

    /// `Σ_c p_c G[r][c]` for every row.
    fn payoffs(&self, p: &[S]) -> Vec<S> {
        (0..self.n_rows())
            .map(|r| self.row(r).iter().zip(p).map(|(g, x)| *g * *x).sum())
            .collect()
    }
}

/// Dense payoff matrix stored row-major.
#[derive(Debug, Clone)]
pub struct DenseGame<S: Scalar> {
    rows: Vec<Vec<S>>,
    n_cols: usize,
}

impl<S: Scalar> DenseGame<S> {
    pub fn new(rows: Vec<Vec<S>>) -> Result<Self> {
        let n_cols = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() || n_cols == 0 {
            return Err(Error::Solver("empty payoff matrix".into()));
        }
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::Solver("ragged payoff matrix".into()));
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Solver("non-finite payoff entry".into()));
        }
        Ok(Self { rows, n_cols })
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.rows
    }
}

impl<S: Scalar> RowOracle<S> for DenseGame<S> {
    fn n_rows(&self) -> usize {
        self.rows.len()
    }
    fn n_cols(&self) -> usize {
        self.n_cols
    }
    fn row(&self, r: usize) -> Vec<S> {
        self.rows[r].clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Solver {
    /// Exact simplex up to [`EXACT_DIRECT_LIMIT`], row generation beyond.
    #[default]
    Auto,
    Exact,
    RowGeneration,
    Multiplicative,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub solver: Solver,
    /// Row-generation rounds (each solves one restricted game).
    pub max_rounds: usize,
    /// Rows added per row-generation round.
    pub batch: usize,
    /// Multiplicative-weights iteration cap.
    pub mwu_iterations: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            solver: Solver::Auto,
            max_rounds: 10_000,
            batch: 32,
            mwu_iterations: 200_000,
        }
    }
}

pub fn solve<S: Scalar, O: RowOracle<S> + ?Sized>(
    oracle: &O,
    opts: &SolveOptions,
) -> Result<GameSolution<S>> {
    match opts.solver {
        Solver::Auto => {
            if oracle.n_rows() <= EXACT_DIRECT_LIMIT && oracle.n_cols() <= EXACT_DIRECT_LIMIT {
                solve_exact(&dense_copy(oracle))
            } else {
                solve_row_generation(oracle, opts)
            }
        }
        Solver::Exact => solve_exact(&dense_copy(oracle)),
        Solver::RowGeneration => solve_row_generation(oracle, opts),
        Solver::Multiplicative => solve_mwu(oracle, opts.mwu_iterations, S::gap_tolerance()),
    }
}

fn dense_copy<S: Scalar, O: RowOracle<S> + ?Sized>(oracle: &O) -> Vec<Vec<S>> {
    (0..oracle.n_rows()).map(|r| oracle.row(r)).collect()
}

/// Builds a solution from strategies, recomputing both sides of the gap.
fn certify<S: Scalar>(rows: &[Vec<S>], p: Vec<S>, q: Vec<S>) -> Result<GameSolution<S>> {
    let witness = clean_distribution(p)?;
    let dual = clean_distribution(q)?.into_probs();
    let lower = rows
        .iter()
        .map(|r| dot(r, witness.probs()))
        .fold(S::infinity(), S::min);
    let upper = column_payoffs(rows, &dual)
        .into_iter()
        .fold(S::neg_infinity(), S::max);
    Ok(GameSolution {
        value: lower,
        witness,
        dual_witness: dual,
        duality_gap: (upper - lower).max(S::zero()),
    })
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

fn column_payoffs<S: Scalar>(rows: &[Vec<S>], q: &[S]) -> Vec<S> {
    let n_cols = rows.first().map(Vec::len).unwrap_or(0);
    let mut out = vec![S::zero(); n_cols];
    for (row, w) in rows.iter().zip(q) {
        if *w == S::zero() {
            continue;
        }
        for (o, g) in out.iter_mut().zip(row) {
            *o = *o + *w * *g;
        }
    }
    out
}

fn clean_distribution<S: Scalar>(v: Vec<S>) -> Result<ArmDistribution<S>> {
    let cleaned: Vec<S> = v.into_iter().map(|x| x.max(S::zero())).collect();
    ArmDistribution::from_weights(cleaned)
        .map_err(|e| Error::Solver(format!("degenerate strategy: {e}")))
}

/// Exact game value by the simplex method.
///
/// Payoffs are shifted to be at least one so that the LP
/// `max Σ_r y_r  s.t.  Σ_r G[r][c] y_r ≤ 1 ∀c,  y ≥ 0`
/// is feasible at the origin and bounded. Its optimum is `1 / value`; the
/// normalized `y` is the row strategy and the column strategy is read off the
/// slack reduced costs.
pub fn solve_exact<S: Scalar>(rows: &[Vec<S>]) -> Result<GameSolution<S>> {
    let game = DenseGame::new(rows.to_vec())?;
    let n_rows = game.rows.len();
    let n_cols = game.n_cols;
    let min_entry = game
        .rows
        .iter()
        .flatten()
        .copied()
        .fold(S::infinity(), S::min);
    let shift = S::one() - min_entry;

    // Tableau: one constraint per column of the game, one variable per row
    // of the game plus one slack per constraint.
    let width = n_rows + n_cols + 1;
    let rhs = width - 1;
    let mut t = vec![vec![S::zero(); width]; n_cols + 1];
    for (r, row) in game.rows.iter().enumerate() {
        for (c, g) in row.iter().enumerate() {
            t[c][r] = *g + shift;
        }
    }
    for c in 0..n_cols {
        t[c][n_rows + c] = S::one();
        t[c][rhs] = S::one();
    }
    // Objective row holds reduced costs; optimal when none is positive.
    let obj = n_cols;
    for r in 0..n_rows {
        t[obj][r] = S::one();
    }
    let mut basis: Vec<usize> = (n_rows..n_rows + n_cols).collect();

    let tol = S::pivot_tolerance();
    let max_pivots = 50 * (n_rows + n_cols) + 1000;
    let mut degenerate_run = 0usize;
    let mut pivots = 0usize;
    loop {
        let bland = degenerate_run > 2 * (n_rows + n_cols);
        let entering = if bland {
            (0..rhs).find(|&j| t[obj][j] > tol)
        } else {
            (0..rhs)
                .filter(|&j| t[obj][j] > tol)
                .max_by(|&a, &b| t[obj][a].partial_cmp(&t[obj][b]).unwrap())
        };
        let Some(e) = entering else { break };

        let mut leave: Option<(usize, S)> = None;
        for (i, row) in t.iter().enumerate().take(n_cols) {
            if row[e] > tol {
                let ratio = row[rhs] / row[e];
                let better = match leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < lr - tol || ((ratio - lr).abs() <= tol && basis[i] < basis[li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((l, ratio)) = leave else {
            return Err(Error::Solver(format!(
                "unbounded game LP at pivot {pivots} (entering {e}); payoffs {n_rows}x{n_cols}"
            )));
        };
        if ratio <= tol {
            degenerate_run += 1;
        } else {
            degenerate_run = 0;
        }

        let pivot = t[l][e];
        for x in t[l].iter_mut() {
            *x = *x / pivot;
        }
        let pivot_row = t[l].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i == l {
                continue;
            }
            let factor = row[e];
            if factor != S::zero() {
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x = *x - factor * *p;
                }
            }
        }
        basis[l] = e;

        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::Solver(format!(
                "simplex did not converge after {pivots} pivots on a {n_rows}x{n_cols} game"
            )));
        }
    }

    let mut y = vec![S::zero(); n_rows];
    for (i, &b) in basis.iter().enumerate() {
        if b < n_rows {
            y[b] = t[i][rhs];
        }
    }
    let x: Vec<S> = (0..n_cols).map(|c| -t[obj][n_rows + c]).collect();
    if y.iter().all(|v| *v <= S::zero()) || x.iter().all(|v| *v <= S::zero()) {
        return Err(Error::Solver(format!(
            "simplex ended without a usable basis on a {n_rows}x{n_cols} game"
        )));
    }
    certify(&game.rows, x, y)
}

/// Row generation with exact restricted solves.
pub fn solve_row_generation<S: Scalar, O: RowOracle<S> + ?Sized>(
    oracle: &O,
    opts: &SolveOptions,
) -> Result<GameSolution<S>> {
    let n_rows = oracle.n_rows();
    let n_cols = oracle.n_cols();
    if n_rows == 0 || n_cols == 0 {
        return Err(Error::Solver("empty payoff matrix".into()));
    }
    let batch = opts.batch.max(1);
    let mut in_active = vec![false; n_rows];
    let mut active: Vec<usize> = Vec::new();

    // Seed with the rows that hurt the uniform strategy most.
    let uniform = vec![S::one() / S::of_usize(n_cols); n_cols];
    add_worst_rows(
        &oracle.payoffs(&uniform),
        &mut in_active,
        &mut active,
        batch,
        None,
    );

    let mut best: Option<GameSolution<S>> = None;
    for round in 0..opts.max_rounds.max(1) {
        let rows: Vec<Vec<S>> = active.iter().map(|&r| oracle.row(r)).collect();
        let restricted = solve_exact(&rows)?;
        let p = restricted.witness.probs();
        let payoffs = oracle.payoffs(p);
        let lower = payoffs.iter().copied().fold(S::infinity(), S::min);
        let upper = column_payoffs(&rows, &restricted.dual_witness)
            .into_iter()
            .fold(S::neg_infinity(), S::max);

        let mut dual = vec![S::zero(); n_rows];
        for (&r, w) in active.iter().zip(&restricted.dual_witness) {
            dual[r] = *w;
        }
        let candidate = GameSolution {
            value: lower,
            witness: restricted.witness.clone(),
            dual_witness: dual,
            duality_gap: (upper - lower).max(S::zero()),
        };
        let gap = candidate.duality_gap;
        if best.as_ref().is_none_or(|b| gap < b.duality_gap) {
            best = Some(candidate);
        }
        if gap <= S::gap_tolerance() {
            return Ok(best.expect("set above"));
        }
        let added = add_worst_rows(
            &payoffs,
            &mut in_active,
            &mut active,
            batch,
            Some(upper - S::gap_tolerance()),
        );
        if added == 0 {
            return Err(Error::Solver(format!(
                "row generation stalled at round {round} with gap {gap}"
            )));
        }
    }
    let best = best.expect("at least one round");
    Err(Error::Solver(format!(
        "row generation hit the round cap ({}) with gap {}",
        opts.max_rounds, best.duality_gap
    )))
}

fn add_worst_rows<S: Scalar>(
    payoffs: &[S],
    in_active: &mut [bool],
    active: &mut Vec<usize>,
    batch: usize,
    below: Option<S>,
) -> usize {
    let mut order: Vec<usize> = (0..payoffs.len())
        .filter(|&r| !in_active[r] && below.is_none_or(|b| payoffs[r] < b))
        .collect();
    order.sort_by(|&a, &b| payoffs[a].partial_cmp(&payoffs[b]).unwrap().then(a.cmp(&b)));
    let mut added = 0;
    for r in order.into_iter().take(batch) {
        in_active[r] = true;
        active.push(r);
        added += 1;
    }
    added
}

/// Multiplicative weights for the column player against exact row best
/// responses; returns the averaged strategies. Stops early once the certified
/// gap reaches `target_gap`.
pub fn solve_mwu<S: Scalar, O: RowOracle<S> + ?Sized>(
    oracle: &O,
    iterations: usize,
    target_gap: S,
) -> Result<GameSolution<S>> {
    let n_rows = oracle.n_rows();
    let n_cols = oracle.n_cols();
    if n_rows == 0 || n_cols == 0 || iterations == 0 {
        return Err(Error::Solver("empty game or zero iterations".into()));
    }
    let rows = dense_copy(oracle);
    let lo = rows.iter().flatten().copied().fold(S::infinity(), S::min);
    let hi = rows
        .iter()
        .flatten()
        .copied()
        .fold(S::neg_infinity(), S::max);
    let range = (hi - lo).max(S::pivot_tolerance());
    let eta = (S::of_usize(n_cols).ln().max(S::one()) / S::of_usize(iterations)).sqrt()
        * S::of(8.0).sqrt();

    let mut scores = vec![S::zero(); n_cols];
    let mut p_sum = vec![S::zero(); n_cols];
    let mut q_count = vec![0usize; n_rows];
    let mut p = vec![S::one() / S::of_usize(n_cols); n_cols];
    let check_every = 64;
    for it in 1..=iterations {
        let responses: Vec<S> = rows.iter().map(|r| dot(r, &p)).collect();
        let br = argmin(&responses);
        q_count[br] += 1;
        for (ps, x) in p_sum.iter_mut().zip(&p) {
            *ps = *ps + *x;
        }
        for (s, g) in scores.iter_mut().zip(&rows[br]) {
            *s = *s + eta * (*g - lo) / range;
        }
        let m = scores.iter().copied().fold(S::neg_infinity(), S::max);
        let weights: Vec<S> = scores.iter().map(|s| (*s - m).exp()).collect();
        let total: S = weights.iter().copied().sum();
        p = weights.into_iter().map(|w| w / total).collect();

        if it % check_every == 0 || it == iterations {
            let q: Vec<S> = q_count.iter().map(|c| S::of_usize(*c)).collect();
            let sol = certify(&rows, p_sum.clone(), q)?;
            if sol.duality_gap <= target_gap || it == iterations {
                return Ok(sol);
            }
        }
    }
    unreachable!("loop returns on its final iteration")
}

fn argmin<S: Scalar>(v: &[S]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x < v[best] {
            best = i;
        }
    }
    best
}
