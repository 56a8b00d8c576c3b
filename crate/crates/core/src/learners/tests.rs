use super::*;
use crate::covers::{DistributionCover, HittingSet};
use crate::environments::{simulate, Adversary, NoiseModel};
use crate::model::FunctionClass;

fn play(
    learner: &mut LearnerHandle,
    class: &FunctionClass,
    t: usize,
    seed: u64,
) -> crate::model::Trace {
    let adv = Adversary::IidMixture {
        weights: vec![1.0 / class.n_functions() as f64; class.n_functions()],
    };
    simulate(learner, &adv, &NoiseModel::Bernoulli, class, t, seed).unwrap()
}

fn three_by_four() -> FunctionClass {
    FunctionClass::new(vec![
        vec![0.9, 0.2, 0.5, 0.6],
        vec![0.1, 0.8, 0.5, 0.3],
        vec![0.4, 0.4, 0.9, 0.2],
    ])
    .unwrap()
}

#[test]
fn sampled_arm_counts() {
    assert_eq!(sampled_arm_count(1.0, std::f64::consts::E).unwrap(), 2);
    // ⌈4 ln 1000⌉ = ⌈27.631⌉
    assert_eq!(sampled_arm_count(0.5, 1000.0).unwrap(), 28);
    assert_eq!(sampled_arm_count(1.0, 1.0).unwrap(), 1);
    assert!(matches!(
        sampled_arm_count(0.0, 10.0),
        Err(Error::NotLearnable(_))
    ));
}

#[test]
fn point_mass_witness_degenerates_to_fixed_arm() {
    let w = ArmDistribution::point_mass(4, 2).unwrap();
    let mut l = alg1_make(0.5, &w, 1000, 3, None).unwrap();
    assert_eq!(l.exp3_arms(), Some(28));
    assert!(l.support().unwrap().iter().all(|a| *a == 2));
    let t = play(&mut l, &three_by_four(), 300, 3);
    assert!(t.chosen_arms().iter().all(|a| *a == 2));
}

#[test]
fn sampled_arms_follow_the_witness() {
    let w = ArmDistribution::new(vec![0.5, 0.0, 0.5, 0.0]).unwrap();
    let l = alg1_make(0.1, &w, 100_000, 8, None).unwrap();
    let arms = l.support().unwrap();
    assert_eq!(arms.len(), 231);
    assert!(arms.iter().all(|a| *a == 0 || *a == 2));
    assert!(arms.contains(&0) && arms.contains(&2));
    assert!(alg1_make(0.0, &w, 100, 8, None).is_err());
}

#[test]
fn singleton_hitting_set_plays_one_arm() {
    let h = HittingSet::new(0.1, vec![3]);
    let mut l = alg2_make(&h, 4, 500, 1, None).unwrap();
    let t = play(&mut l, &three_by_four(), 500, 1);
    assert!(t.chosen_arms().iter().all(|a| *a == 3));
}

#[test]
fn full_hitting_set_matches_plain_exp3() {
    let c = three_by_four();
    let h = HittingSet::new(0.1, vec![0, 1, 2, 3]);
    let mut a = alg2_make(&h, 4, 2000, 21, None).unwrap();
    let mut b = LearnerHandle::exp3(4, 2000, None, 21).unwrap();
    assert_eq!(play(&mut a, &c, 2000, 5), play(&mut b, &c, 2000, 5));
}

#[test]
fn single_distribution_cover_samples_it() {
    let cover = DistributionCover {
        alpha: 0.1,
        beta: 0.1,
        dists: vec![ArmDistribution::new(vec![0.0, 0.5, 0.0, 0.5]).unwrap()],
    };
    let mut l = alg3_make(&cover, 2000, 4, None).unwrap();
    assert_eq!(l.exp3_state().unwrap().eta(), 0.0);
    let t = play(&mut l, &three_by_four(), 2000, 4);
    let ones = t.chosen_arms().iter().filter(|a| **a == 1).count();
    assert!(t.chosen_arms().iter().all(|a| *a == 1 || *a == 3));
    // Binomial(2000, 1/2): 3σ ≈ 67.
    assert!((ones as i64 - 1000).abs() < 67);
}

#[test]
fn point_mass_cover_couples_with_hitting_set() {
    let c = three_by_four();
    let h = HittingSet::new(0.2, vec![2, 0, 3]);
    let cover = h.to_cover(4).unwrap();
    let mut a = alg2_make(&h, 4, 3000, 13, None).unwrap();
    let mut b = alg3_make(&cover, 3000, 13, None).unwrap();
    assert_eq!(play(&mut a, &c, 3000, 2), play(&mut b, &c, 3000, 2));
}

#[test]
fn constructors_reject_empty_inputs() {
    assert!(alg2_make::<f64>(&HittingSet::new(0.1, vec![]), 3, 10, 0, None).is_err());
    assert!(alg2_make::<f64>(&HittingSet::new(0.1, vec![5]), 3, 10, 0, None).is_err());
    let empty = DistributionCover::<f64> {
        alpha: 0.1,
        beta: 0.1,
        dists: vec![],
    };
    assert!(alg3_make(&empty, 10, 0, None).is_err());
    assert!(LearnerHandle::<f64>::fixed(2, 2).is_err());
}

#[test]
fn rounds_must_alternate() {
    let mut learners = vec![
        LearnerHandle::exp3(3, 10, None, 0).unwrap(),
        LearnerHandle::uniform(3, 0).unwrap(),
        LearnerHandle::fixed(3, 1).unwrap(),
        alg3_make(
            &HittingSet::new(0.1, vec![0, 1]).to_cover(3).unwrap(),
            10,
            0,
            None,
        )
        .unwrap(),
    ];
    for l in learners.iter_mut() {
        assert!(l.observe(0.5).is_err());
        let a = l.select();
        assert_eq!(l.select(), a);
        assert!(l.observe(2.0).is_err());
        l.observe(0.5).unwrap();
        assert!(l.observe(0.5).is_err());
    }
}

#[test]
fn learners_are_deterministic() {
    let c = three_by_four();
    for seed in [0u64, 1, 99] {
        let mut a = LearnerHandle::exp3(4, 1000, None, seed).unwrap();
        let mut b = LearnerHandle::exp3(4, 1000, None, seed).unwrap();
        assert_eq!(play(&mut a, &c, 1000, seed), play(&mut b, &c, 1000, seed));
    }
}

#[test]
fn eta_override_is_used() {
    let l = LearnerHandle::<f64>::exp3(4, 100, Some(0.3), 0).unwrap();
    assert_eq!(l.exp3_state().unwrap().eta(), 0.3);
}
