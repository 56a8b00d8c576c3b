#![allow(dead_code)]

use noisy_bandit::complexity::good_region;
use noisy_bandit::FunctionClass;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_class(rng: &mut ChaCha8Rng, n_arms: usize, n_f: usize) -> FunctionClass {
    FunctionClass::new(
        (0..n_f)
            .map(|_| (0..n_arms).map(|_| rng.gen::<f64>()).collect())
            .collect(),
    )
    .unwrap()
}

pub fn payoff(class: &FunctionClass, alpha: f64) -> Vec<Vec<f64>> {
    good_region(class, alpha)
        .unwrap()
        .mask
        .iter()
        .map(|r| r.iter().map(|b| if *b { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// Game value by enumerating the vertices of
/// `{(p, v) : v ≤ G_r·p, Σp = 1, p ≥ 0}`.
pub fn vertex_value(g: &[Vec<f64>]) -> f64 {
    let n = g[0].len();
    let m = g.len();
    let cons: Vec<(Vec<f64>, f64)> = (0..m)
        .map(|i| (g[i].clone(), -1.0))
        .chain((0..n).map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            (e, 0.0)
        }))
        .collect();
    let total = cons.len();
    let mut best = f64::NEG_INFINITY;
    let mut pick: Vec<usize> = (0..n).collect();
    loop {
        let mut a = vec![vec![0.0; n + 2]; n + 1];
        for (row, &c) in pick.iter().enumerate() {
            a[row][..n].copy_from_slice(&cons[c].0);
            a[row][n] = cons[c].1;
        }
        a[n][..n].fill(1.0);
        a[n][n + 1] = 1.0;
        if let Some(x) = gauss(a) {
            let (p, v) = (&x[..n], x[n]);
            let ok = p.iter().all(|q| *q >= -1e-9)
                && g.iter()
                    .all(|r| r.iter().zip(p).map(|(a, b)| a * b).sum::<f64>() >= v - 1e-9);
            if ok {
                best = best.max(v);
            }
        }
        let Some(pos) = (0..n).rev().find(|&i| pick[i] < total - n + i) else {
            break;
        };
        pick[pos] += 1;
        for i in pos + 1..n {
            pick[i] = pick[i - 1] + 1;
        }
    }
    best
}

fn gauss(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=n {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

/// Best arm distribution on the `1/steps` grid of the simplex.
pub fn grid_value(g: &[Vec<f64>], steps: usize) -> f64 {
    fn rec(i: usize, left: usize, counts: &mut [usize], g: &[Vec<f64>], best: &mut usize) {
        if i + 1 == counts.len() {
            counts[i] = left;
            let v = g
                .iter()
                .map(|r| {
                    r.iter()
                        .zip(counts.iter())
                        .filter(|(a, _)| **a > 0.5)
                        .map(|(_, c)| *c)
                        .sum::<usize>()
                })
                .min()
                .unwrap_or(0);
            *best = (*best).max(v);
            return;
        }
        for c in 0..=left {
            counts[i] = c;
            rec(i + 1, left - c, counts, g, best);
        }
    }
    let mut counts = vec![0usize; g[0].len()];
    let mut best = 0usize;
    rec(0, steps, &mut counts, g, &mut best);
    best as f64 / steps as f64
}
