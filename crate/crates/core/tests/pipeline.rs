mod common;

use std::fs;

use noisy_bandit::complexity::{gamma, gamma_convex, ConvexOptions};
use noisy_bandit::covers::{
    greedy_distribution_cover, is_distribution_cover, is_hitting_set, witness_to_hitting_set,
};
use noisy_bandit::environments::{simulate, Adversary, NoiseModel};
use noisy_bandit::harness::{emit_csv, parse_csv, run_experiment_in, ExperimentConfig, CSV_HEADER};
use noisy_bandit::learners::{alg1_make, alg2_make, alg3_make, Learner};
use noisy_bandit::{regret, Error, FunctionClass, FunctionClass32, LearnerHandle32};

fn class() -> FunctionClass {
    FunctionClass::new(vec![
        vec![0.9, 0.1, 0.2, 0.85, 0.3],
        vec![0.1, 0.9, 0.2, 0.3, 0.85],
        vec![0.2, 0.2, 0.9, 0.85, 0.85],
    ])
    .unwrap()
}

#[test]
fn witness_to_learners() {
    let c = class();
    let sol = gamma(&c, 0.1).unwrap();
    let h = witness_to_hitting_set(&sol.witness, sol.value, &c, 0.1).unwrap();
    assert!(is_hitting_set(&c, 0.1, &h.arms));
    let adv = Adversary::FixedSequence {
        sequence: (0..3000).map(|t| t % 3).collect(),
    };
    let mut l2 = alg2_make(&h, c.n_arms(), 3000, 9, None).unwrap();
    let t2 = simulate(&mut l2, &adv, &NoiseModel::Bernoulli, &c, 3000, 9).unwrap();
    let r2 = regret(&t2, &c).unwrap();
    assert!(r2 <= 0.1 * 3000.0 + 2.0 * (h.len() as f64 * 3000.0 * (h.len() as f64).ln()).sqrt());

    let cover = greedy_distribution_cover(&c, 0.1, 0.1).unwrap();
    assert!(is_distribution_cover(&c, 0.1, 0.1, &cover.dists));
    let mut l3 = alg3_make(&cover, 3000, 9, None).unwrap();
    assert_eq!(l3.n_arms(), 5);
    simulate(&mut l3, &adv, &NoiseModel::Bernoulli, &c, 3000, 9).unwrap();

    let co = gamma_convex(&c, 0.1, &ConvexOptions::default()).unwrap();
    let mut l1 = alg1_make(co.value, &co.witness, 3000, 9, None).unwrap();
    let t1 = simulate(&mut l1, &adv, &NoiseModel::Bernoulli, &c, 3000, 9).unwrap();
    assert_eq!(t1.horizon(), 3000);
}

#[test]
fn single_precision_pipeline() {
    let c = FunctionClass32::new(vec![vec![1.0, 0.0, 0.5], vec![0.0, 1.0, 0.5]]).unwrap();
    let sol = gamma(&c, 0.25f32).unwrap();
    assert!((sol.value - 0.5).abs() < 1e-5);
    let mut l = LearnerHandle32::exp3(3, 500, None, 1).unwrap();
    let adv = Adversary::IidMixture {
        weights: vec![0.5f32, 0.5],
    };
    let t = simulate(&mut l, &adv, &NoiseModel::Bernoulli, &c, 500, 1).unwrap();
    assert!(regret(&t, &c).unwrap().is_finite());
}

#[test]
fn config_with_sidecar_files() {
    let dir = std::env::temp_dir().join(format!("nb-pipeline-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    fs::write(dir.join("class.json"), class().to_json().unwrap()).unwrap();
    let seq: String = (0..200).map(|t| format!("{}\n", t % 3)).collect();
    fs::write(dir.join("seq.txt"), seq).unwrap();
    let cfg = ExperimentConfig::from_json(
        r#"{
            "class": {"path": "class.json"},
            "learner": {"kind": "alg2", "alpha": 0.1},
            "adversary": {"kind": "fixed_sequence", "path": "seq.txt"},
            "horizons": [50, 200],
            "trials": 8,
            "seed": 5,
            "bound_checks": ["alg2"]
        }"#,
    )
    .unwrap();
    let rep = run_experiment_in(&cfg, &dir).unwrap();
    assert_eq!(rep.rows.len(), 2);
    let csv = dir.join("out").join("r.csv");
    emit_csv(&rep.rows, &csv).unwrap();
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with(CSV_HEADER));
    let back = parse_csv(&text).unwrap();
    for (a, b) in back.iter().zip(&rep.rows) {
        assert_eq!(a.horizon, b.horizon);
        assert!((a.mean_regret - b.mean_regret).abs() <= 1e-9 * b.mean_regret.abs().max(1e-300));
        assert_eq!(a.pass, b.pass);
    }

    let mut short = cfg.clone();
    short.horizons = vec![50, 500];
    assert!(matches!(
        run_experiment_in(&short, &dir),
        Err(Error::Config { .. })
    ));
    let mut missing = cfg.clone();
    missing.class = serde_json::json!({"path": "nope.json"});
    assert!(matches!(
        run_experiment_in(&missing, &dir),
        Err(Error::Io { .. })
    ));
    fs::remove_dir_all(&dir).unwrap();
}
