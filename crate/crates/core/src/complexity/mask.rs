use crate::error::{Error, Result};
use crate::model::FunctionClass;
use crate::scalar::Scalar;

use super::game::RowOracle;

/// Arms within `alpha` of each function's supremum.
#[derive(Debug, Clone, PartialEq)]
pub struct GoodRegionMask<S: Scalar = f64> {
    pub alpha: S,
    pub mask: Vec<Vec<bool>>,
    pub sup_values: Vec<S>,
}

pub(crate) fn check_alpha<S: Scalar>(alpha: S) -> Result<()> {
    if !(alpha > S::zero() && alpha <= S::one()) {
        return Err(Error::param(format!("alpha = {alpha} is outside (0, 1]")));
    }
    Ok(())
}

/// Good region of a single value vector: `sup − v(a) ≤ alpha`.
pub fn good_region_of<S: Scalar>(values: &[S], alpha: S) -> (Vec<bool>, S) {
    let sup = values.iter().copied().fold(S::neg_infinity(), S::max);
    (values.iter().map(|v| sup - *v <= alpha).collect(), sup)
}

pub fn good_region<S: Scalar>(class: &FunctionClass<S>, alpha: S) -> Result<GoodRegionMask<S>> {
    check_alpha(alpha)?;
    let (mask, sup_values) = class
        .means()
        .iter()
        .map(|row| good_region_of(row, alpha))
        .unzip();
    Ok(GoodRegionMask {
        alpha,
        mask,
        sup_values,
    })
}

impl<S: Scalar> GoodRegionMask<S> {
    pub fn n_functions(&self) -> usize {
        self.mask.len()
    }

    pub fn n_arms(&self) -> usize {
        self.mask.first().map(Vec::len).unwrap_or(0)
    }

    /// Column view: which functions arm `a` is good for.
    pub fn column(&self, arm: usize) -> Vec<bool> {
        self.mask.iter().map(|row| row[arm]).collect()
    }
}

/// 0/1 payoff rows packed as bitsets, deduplicated.
///
/// `owners[r]` lists the original row indices that produced packed row `r`.
#[derive(Debug, Clone)]
pub struct MaskGame {
    n_cols: usize,
    words: usize,
    bits: Vec<u64>,
    owners: Vec<Vec<usize>>,
}

impl MaskGame {
    pub fn new<I>(n_cols: usize, rows: I) -> Self
    where
        I: IntoIterator<Item = Vec<bool>>,
    {
        let words = n_cols.div_ceil(64);
        let mut bits = Vec::new();
        let mut owners: Vec<Vec<usize>> = Vec::new();
        let mut seen: std::collections::HashMap<Vec<u64>, usize> = Default::default();
        for (i, row) in rows.into_iter().enumerate() {
            let mut packed = vec![0u64; words];
            for (c, b) in row.iter().enumerate() {
                if *b {
                    packed[c / 64] |= 1 << (c % 64);
                }
            }
            match seen.get(&packed) {
                Some(&r) => owners[r].push(i),
                None => {
                    seen.insert(packed.clone(), owners.len());
                    bits.extend_from_slice(&packed);
                    owners.push(vec![i]);
                }
            }
        }
        Self {
            n_cols,
            words,
            bits,
            owners,
        }
    }

    pub fn owners(&self) -> &[Vec<usize>] {
        &self.owners
    }

    fn packed(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words..(r + 1) * self.words]
    }
}

impl<S: Scalar> RowOracle<S> for MaskGame {
    fn n_rows(&self) -> usize {
        self.owners.len()
    }

    fn n_cols(&self) -> usize {
        self.n_cols
    }

    fn row(&self, r: usize) -> Vec<S> {
        let packed = self.packed(r);
        (0..self.n_cols)
            .map(|c| {
                if packed[c / 64] >> (c % 64) & 1 == 1 {
                    S::one()
                } else {
                    S::zero()
                }
            })
            .collect()
    }

    fn payoffs(&self, p: &[S]) -> Vec<S> {
        (0..self.owners.len())
            .map(|r| {
                let mut acc = S::zero();
                for (w, word) in self.packed(r).iter().enumerate() {
                    let mut word = *word;
                    while word != 0 {
                        let c = w * 64 + word.trailing_zeros() as usize;
                        acc = acc + p[c];
                        word &= word - 1;
                    }
                }
                acc
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_one_gives_full_mask() {
        let c = FunctionClass::new(vec![vec![0.0, 1.0, 0.3], vec![0.9, 0.2, 0.0]]).unwrap();
        let m = good_region(&c, 1.0).unwrap();
        assert!(m.mask.iter().flatten().all(|b| *b));
    }

    #[test]
    fn ternary_values_keep_only_the_top() {
        let c = FunctionClass::new(vec![vec![0.0, 0.5, 1.0, 0.5, 1.0, 0.0]]).unwrap();
        let m = good_region(&c, 0.4).unwrap();
        assert_eq!(m.mask[0], vec![false, false, true, false, true, false]);
    }

    #[test]
    fn direct_threshold() {
        let c = FunctionClass::new(vec![vec![0.9, 0.4, 0.85]]).unwrap();
        let m = good_region(&c, 0.1).unwrap();
        assert_eq!(m.mask[0], vec![true, false, true]);
        assert_eq!(m.sup_values, vec![0.9]);
    }

    #[test]
    fn alpha_range_is_enforced() {
        let c = FunctionClass::new(vec![vec![0.5]]).unwrap();
        assert!(good_region(&c, 0.0).is_err());
        assert!(good_region(&c, 1.5).is_err());
        assert!(good_region(&c, f64::NAN).is_err());
    }

    #[test]
    fn every_row_contains_its_argmax() {
        let c = FunctionClass::new(vec![vec![0.3, 0.31, 0.1], vec![0.0, 0.0, 0.0]]).unwrap();
        let m = good_region(&c, 1e-6).unwrap();
        for row in &m.mask {
            assert!(row.iter().any(|b| *b));
        }
    }

    #[test]
    fn mask_game_dedupes_and_sums() {
        let g = MaskGame::new(
            70,
            vec![
                (0..70).map(|c| c % 2 == 0).collect::<Vec<_>>(),
                (0..70).map(|c| c == 69).collect(),
                (0..70).map(|c| c % 2 == 0).collect(),
            ],
        );
        assert_eq!(RowOracle::<f64>::n_rows(&g), 2);
        assert_eq!(g.owners()[0], vec![0, 2]);
        let p = vec![1.0 / 70.0; 70];
        let pay = RowOracle::<f64>::payoffs(&g, &p);
        assert!((pay[0] - 35.0 / 70.0).abs() < 1e-12);
        assert!((pay[1] - 1.0 / 70.0).abs() < 1e-12);
        let dense: Vec<f64> = g.row(1);
        assert_eq!(dense.iter().sum::<f64>(), 1.0);
    }
}
