//! Config-driven regret experiments.
//!
//! A run expands an [`ExperimentConfig`] into `trials` seeded simulations per
//! horizon, aggregates the regret and compares the mean against the named
//! upper bounds. Per-trial seeds depend only on `(seed, T, trial)`, so the
//! report does not depend on how trials are scheduled across threads.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::complexity::{convex_grid_class, gamma_convex, ConvexOptions, DEFAULT_GRID_CAP};
use crate::covers::{greedy_distribution_cover, greedy_hitting_set, DistributionCover, HittingSet};
use crate::environments::{
    hard_instance, load_sequence, simulate, Adversary, ArmLayout, NoiseModel, Sign,
};
use crate::error::{Error, Result};
use crate::learners::{
    alg1_make, alg2_make, alg3_make, sampled_arm_count, LearnerHandle, LearnerKind,
};
use crate::model::{regret, ArmDistribution, FunctionClass};
use crate::rng::trial_seed;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const CSV_HEADER: &str = "T,mean_regret,stderr,bound_name,bound_value,pass";

fn config_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerConfig {
    pub kind: LearnerKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// Simplex-grid resolution of the hull used by the structured learners.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_resolution: Option<usize>,
    /// Arm played by `fixed_arm`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arm: Option<usize>,
}

impl LearnerConfig {
    pub fn exp3() -> Self {
        Self {
            kind: LearnerKind::Exp3,
            alpha: None,
            beta: None,
            eta: None,
            grid_resolution: None,
            arm: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundName {
    /// `2 sqrt(K T ln K)`.
    Exp3,
    /// `alpha T + 2 sqrt(m T ln m) + 1` with `m` sampled arms.
    Alg1,
    /// `alpha T + 2 sqrt(|H| T ln |H|)`.
    Alg2,
    /// `(alpha + beta) T + 2 sqrt(|I| T ln |I|)`.
    Alg3,
}

impl BoundName {
    pub fn label(self) -> &'static str {
        match self {
            BoundName::Exp3 => "exp3",
            BoundName::Alg1 => "alg1",
            BoundName::Alg2 => "alg2",
            BoundName::Alg3 => "alg3",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
}

/// Raw experiment document. `class` is either an inline class document or
/// `{"path": ...}`; `adversary` is an adversary block, where a fixed
/// sequence may be given as `{"kind": "fixed_sequence", "path": ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub class: Value,
    pub learner: LearnerConfig,
    pub adversary: Value,
    #[serde(default)]
    pub noise: NoiseModel,
    pub horizons: Vec<usize>,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub bound_checks: Vec<BoundName>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_err(path, e.into_inner().to_string())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// SHA-256 of the canonical (key-sorted) JSON form.
    pub fn hash(&self) -> Result<String> {
        let canonical = serde_json::to_string(&serde_json::to_value(self)?)?;
        let digest = Sha256::digest(canonical.as_bytes());
        let mut out = String::with_capacity(64);
        for b in digest.iter() {
            let _ = write!(out, "{b:02x}");
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(config_err("trials", "need at least one trial"));
        }
        if self.horizons.is_empty() {
            return Err(config_err("horizons", "need at least one horizon"));
        }
        if let Some(i) = self.horizons.iter().position(|t| *t == 0) {
            return Err(config_err(
                format!("horizons[{i}]"),
                "horizons must be positive",
            ));
        }
        if let Some(i) = self.horizons.windows(2).position(|w| w[0] >= w[1]) {
            return Err(config_err(
                format!("horizons[{}]", i + 1),
                "horizons must be strictly increasing",
            ));
        }
        self.noise
            .validate()
            .map_err(|e| config_err("noise", e.to_string()))
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn resolve_class(value: &Value, base: &Path) -> Result<FunctionClass> {
    if let Some(p) = value.get("path") {
        let p = p
            .as_str()
            .ok_or_else(|| config_err("class.path", "expected a string"))?;
        let path = resolve(base, Path::new(p));
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        return FunctionClass::from_json(&text)
            .map_err(|e| config_err(format!("class ({})", path.display()), e.to_string()));
    }
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = if inner == "." {
            "class".into()
        } else {
            format!("class.{inner}")
        };
        config_err(path, e.into_inner().to_string())
    })
}

fn resolve_adversary(value: &Value, base: &Path, class: &FunctionClass) -> Result<Adversary> {
    let kind = value.get("kind").and_then(Value::as_str);
    if kind == Some("fixed_sequence") {
        if let Some(p) = value.get("path") {
            let p = p
                .as_str()
                .ok_or_else(|| config_err("adversary.path", "expected a string"))?;
            return Ok(Adversary::FixedSequence {
                sequence: load_sequence(&resolve(base, Path::new(p)))?,
            });
        }
    }
    if kind == Some("adaptive_punisher") && class.n_functions() == 0 {
        return Err(config_err("adversary", "empty class"));
    }
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = if inner == "." {
            "adversary".into()
        } else {
            format!("adversary.{inner}")
        };
        config_err(path, e.into_inner().to_string())
    })
}

/// Everything needed to build a learner for any horizon and seed.
#[derive(Debug, Clone)]
enum Prepared {
    Exp3 {
        eta: Option<f64>,
    },
    Alg1 {
        alpha: f64,
        gamma: f64,
        witness: ArmDistribution,
        eta: Option<f64>,
    },
    Alg2 {
        set: HittingSet,
        eta: Option<f64>,
    },
    Alg3 {
        cover: DistributionCover,
        eta: Option<f64>,
    },
    Uniform,
    Fixed {
        arm: usize,
    },
}

fn require(v: Option<f64>, field: &str, kind: LearnerKind) -> Result<f64> {
    v.ok_or_else(|| {
        config_err(
            format!("learner.{field}"),
            format!("required for {kind:?} learners"),
        )
    })
}

impl Prepared {
    fn new(cfg: &LearnerConfig, class: &FunctionClass) -> Result<Self> {
        let res = cfg.grid_resolution.unwrap_or(2);
        let hull = || {
            convex_grid_class(class, res, DEFAULT_GRID_CAP)
                .map_err(|e| config_err("learner.grid_resolution", e.to_string()))
        };
        if let Some(eta) = cfg.eta {
            if !(eta >= 0.0 && eta.is_finite()) {
                return Err(config_err(
                    "learner.eta",
                    format!("eta {eta} must be finite and non-negative"),
                ));
            }
        }
        let at = |field: &'static str| {
            move |e: Error| config_err(format!("learner.{field}"), e.to_string())
        };
        Ok(match cfg.kind {
            LearnerKind::Exp3 => Prepared::Exp3 { eta: cfg.eta },
            LearnerKind::Alg1 => {
                let alpha = require(cfg.alpha, "alpha", cfg.kind)?;
                let opts = ConvexOptions::with_resolution(res);
                let sol = gamma_convex(class, alpha, &opts).map_err(at("alpha"))?;
                if !(sol.value > 0.0) {
                    return Err(Error::NotLearnable(format!(
                        "convexified volume is zero at alpha = {alpha}"
                    )));
                }
                Prepared::Alg1 {
                    alpha,
                    gamma: sol.value,
                    witness: sol.witness,
                    eta: cfg.eta,
                }
            }
            LearnerKind::Alg2 => {
                let alpha = require(cfg.alpha, "alpha", cfg.kind)?;
                let set = greedy_hitting_set(&hull()?, alpha).map_err(at("alpha"))?;
                Prepared::Alg2 { set, eta: cfg.eta }
            }
            LearnerKind::Alg3 => {
                let alpha = require(cfg.alpha, "alpha", cfg.kind)?;
                let beta = require(cfg.beta, "beta", cfg.kind)?;
                let cover = greedy_distribution_cover(&hull()?, alpha, beta).map_err(at("beta"))?;
                Prepared::Alg3 {
                    cover,
                    eta: cfg.eta,
                }
            }
            LearnerKind::UniformBaseline => Prepared::Uniform,
            LearnerKind::FixedArm => {
                let arm = cfg.arm.unwrap_or(0);
                if arm >= class.n_arms() {
                    return Err(config_err(
                        "learner.arm",
                        format!("arm {arm} outside {} arms", class.n_arms()),
                    ));
                }
                Prepared::Fixed { arm }
            }
        })
    }

    fn build(&self, n_arms: usize, horizon: usize, seed: u64) -> Result<LearnerHandle> {
        match self {
            Prepared::Exp3 { eta } => LearnerHandle::exp3(n_arms, horizon, *eta, seed),
            Prepared::Alg1 {
                gamma,
                witness,
                eta,
                ..
            } => alg1_make(*gamma, witness, horizon, seed, *eta),
            Prepared::Alg2 { set, eta } => alg2_make(set, n_arms, horizon, seed, *eta),
            Prepared::Alg3 { cover, eta } => alg3_make(cover, horizon, seed, *eta),
            Prepared::Uniform => LearnerHandle::uniform(n_arms, seed),
            Prepared::Fixed { arm } => LearnerHandle::fixed(n_arms, *arm),
        }
    }

    fn bound(&self, name: BoundName, n_arms: usize, horizon: usize) -> Result<f64> {
        let t = horizon as f64;
        let exp3 = |k: usize| {
            let k = k as f64;
            2.0 * (k * t * k.ln()).sqrt()
        };
        match (name, self) {
            (BoundName::Exp3, _) => Ok(exp3(n_arms)),
            (BoundName::Alg1, Prepared::Alg1 { alpha, gamma, .. }) => {
                let m = sampled_arm_count(*gamma, t)?;
                Ok(alpha * t + exp3(m) + 1.0)
            }
            (BoundName::Alg2, Prepared::Alg2 { set, .. }) => Ok(set.alpha * t + exp3(set.len())),
            (BoundName::Alg3, Prepared::Alg3 { cover, .. }) => {
                Ok((cover.alpha + cover.beta) * t + exp3(cover.len()))
            }
            (name, _) => Err(config_err(
                "bound_checks",
                format!("bound `{}` needs the matching learner", name.label()),
            )),
        }
    }

    /// Size of the set Exp3 runs on, for reporting.
    fn support_size(&self, n_arms: usize, horizon: usize) -> Option<usize> {
        match self {
            Prepared::Exp3 { .. } => Some(n_arms),
            Prepared::Alg1 { gamma, .. } => sampled_arm_count(*gamma, horizon as f64).ok(),
            Prepared::Alg2 { set, .. } => Some(set.len()),
            Prepared::Alg3 { cover, .. } => Some(cover.len()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretRow {
    #[serde(rename = "T")]
    pub horizon: usize,
    pub mean_regret: f64,
    pub stderr: f64,
    pub trials: usize,
    pub bound_name: Option<String>,
    pub bound_value: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
    pub learner: LearnerKind,
    /// Per-horizon number of arms or meta-arms Exp3 ran on.
    pub exp3_support: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretReport {
    pub metadata: ReportMetadata,
    pub rows: Vec<RegretRow>,
}

impl RegretReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Sample mean and standard error `sd / sqrt(n)`.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn run_trials(
    prepared: &Prepared,
    class: &FunctionClass,
    adversary: &Adversary,
    noise: &NoiseModel,
    horizon: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let s = trial_seed(seed, horizon as u64, i as u64);
            let mut learner = prepared.build(class.n_arms(), horizon, s)?;
            let trace = simulate(&mut learner, adversary, noise, class, horizon, s)?;
            regret(&trace, class)
        })
        .collect()
}

/// Runs a config whose relative paths resolve against `base_dir`.
pub fn run_experiment_in(config: &ExperimentConfig, base_dir: &Path) -> Result<RegretReport> {
    config.validate()?;
    let class = resolve_class(&config.class, base_dir)?;
    let adversary = resolve_adversary(&config.adversary, base_dir, &class)?;
    let t_max = *config.horizons.last().expect("validated non-empty");
    adversary
        .validate(&class, t_max)
        .map_err(|e| config_err("adversary", e.to_string()))?;
    let prepared = Prepared::new(&config.learner, &class)?;
    for b in &config.bound_checks {
        prepared.bound(*b, class.n_arms(), t_max)?;
    }

    let mut rows = Vec::new();
    let mut exp3_support = Vec::new();
    for &t in &config.horizons {
        let regrets = run_trials(
            &prepared,
            &class,
            &adversary,
            &config.noise,
            t,
            config.trials,
            config.seed,
        )?;
        let (mean, se) = mean_stderr(&regrets);
        exp3_support.push(prepared.support_size(class.n_arms(), t));
        if config.bound_checks.is_empty() {
            rows.push(RegretRow {
                horizon: t,
                mean_regret: mean,
                stderr: se,
                trials: config.trials,
                bound_name: None,
                bound_value: None,
                pass: true,
            });
        }
        for b in &config.bound_checks {
            let value = prepared.bound(*b, class.n_arms(), t)?;
            rows.push(RegretRow {
                horizon: t,
                mean_regret: mean,
                stderr: se,
                trials: config.trials,
                bound_name: Some(b.label().into()),
                bound_value: Some(value),
                pass: mean + 2.0 * se <= value,
            });
        }
    }
    Ok(RegretReport {
        metadata: ReportMetadata {
            config_hash: config.hash()?,
            seed: config.seed,
            version: VERSION.into(),
            learner: config.learner.kind,
            exp3_support,
        },
        rows,
    })
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<RegretReport> {
    run_experiment_in(config, Path::new("."))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignEstimate {
    pub sign: Sign,
    pub mean_regret: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundRow {
    #[serde(rename = "T")]
    pub horizon: usize,
    pub delta: f64,
    pub trials: usize,
    pub plus: SignEstimate,
    pub minus: SignEstimate,
    /// Sign with the larger `mean + 2 stderr`.
    pub worst: Sign,
    pub threshold: f64,
    pub pass: bool,
}

impl LowerBoundRow {
    fn worst_estimate(&self) -> &SignEstimate {
        match self.worst {
            Sign::Plus => &self.plus,
            Sign::Minus => &self.minus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub seed: u64,
    pub version: String,
    pub layout: ArmLayout,
    pub learner: LearnerConfig,
    pub rows: Vec<LowerBoundRow>,
}

impl LowerBoundReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// CSV view: the worse sign's estimate against the threshold.
    pub fn regret_rows(&self) -> Vec<RegretRow> {
        self.rows
            .iter()
            .map(|r| {
                let w = r.worst_estimate();
                RegretRow {
                    horizon: r.horizon,
                    mean_regret: w.mean_regret,
                    stderr: w.stderr,
                    trials: r.trials,
                    bound_name: Some("lower_bound".into()),
                    bound_value: Some(r.threshold),
                    pass: r.pass,
                }
            })
            .collect()
    }
}

/// Runs the learner on both environments of the hard pair at every horizon.
///
/// Passes when the worse sign satisfies `mean + 2 stderr ≥ (3 / (32 sqrt 2)) sqrt T`.
pub fn run_lower_bound(
    horizons: &[usize],
    layout: ArmLayout,
    learner: &LearnerConfig,
    trials: usize,
    seed: u64,
) -> Result<LowerBoundReport> {
    if trials == 0 {
        return Err(config_err("trials", "need at least one trial"));
    }
    if let Some(i) = horizons.windows(2).position(|w| w[0] >= w[1]) {
        return Err(config_err(
            format!("horizons[{}]", i + 1),
            "horizons must be strictly increasing",
        ));
    }
    let mut rows = Vec::with_capacity(horizons.len());
    for &t in horizons {
        let mut est = Vec::with_capacity(2);
        let mut delta = 0.0;
        for sign in [Sign::Plus, Sign::Minus] {
            let inst = hard_instance::<f64>(t, layout, sign)?;
            delta = inst.delta;
            let prepared = Prepared::new(learner, &inst.class)?;
            let regrets = run_trials(
                &prepared,
                &inst.class,
                &inst.adversary(),
                &NoiseModel::Bernoulli,
                t,
                trials,
                seed,
            )?;
            let (mean_regret, stderr) = mean_stderr(&regrets);
            est.push(SignEstimate {
                sign,
                mean_regret,
                stderr,
            });
        }
        let minus = est.pop().expect("two signs");
        let plus = est.pop().expect("two signs");
        let upper = |e: &SignEstimate| e.mean_regret + 2.0 * e.stderr;
        let worst = if upper(&minus) > upper(&plus) {
            Sign::Minus
        } else {
            Sign::Plus
        };
        let threshold = crate::environments::lower_bound_threshold(t);
        let pass = upper(&plus).max(upper(&minus)) >= threshold;
        rows.push(LowerBoundRow {
            horizon: t,
            delta,
            trials,
            plus,
            minus,
            worst,
            threshold,
            pass,
        });
    }
    Ok(LowerBoundReport {
        seed,
        version: VERSION.into(),
        layout,
        learner: learner.clone(),
        rows,
    })
}

fn fmt_float(x: f64) -> String {
    format!("{x:.9e}")
}

/// CSV text with ten significant digits per float and LF line endings.
pub fn csv_string(rows: &[RegretRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.horizon,
            fmt_float(r.mean_regret),
            fmt_float(r.stderr),
            r.bound_name.as_deref().unwrap_or(""),
            r.bound_value.map(fmt_float).unwrap_or_default(),
            r.pass
        );
    }
    out
}

/// Writes through a sibling temporary file so a failed write leaves no
/// partial artifact behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    let result = fs::write(&tmp, contents).and_then(|_| fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}

pub fn emit_csv(rows: &[RegretRow], path: &Path) -> Result<()> {
    write_atomic(path, &csv_string(rows))
}

/// Parses CSV produced by [`csv_string`].
pub fn parse_csv(text: &str) -> Result<Vec<RegretRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::structural("missing CSV header"));
    }
    let bad = |l: &str| Error::structural(format!("malformed CSV row `{l}`"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 6 {
                return Err(bad(l));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(l));
            Ok(RegretRow {
                horizon: f[0].parse().map_err(|_| bad(l))?,
                mean_regret: num(f[1])?,
                stderr: num(f[2])?,
                trials: 0,
                bound_name: (!f[3].is_empty()).then(|| f[3].to_string()),
                bound_value: if f[4].is_empty() {
                    None
                } else {
                    Some(num(f[4])?)
                },
                pass: f[5].parse().map_err(|_| bad(l))?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_config() -> ExperimentConfig {
        ExperimentConfig::from_json(
            r#"{
                "class": {"arms": 3, "means": [[0.5, 0.5, 0.5]]},
                "learner": {"kind": "fixed_arm", "arm": 1},
                "adversary": {"kind": "iid_mixture", "weights": [1.0]},
                "noise": {"kind": "bernoulli"},
                "horizons": [10, 100],
                "trials": 4,
                "seed": 3
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn fixed_arm_on_constant_class_has_zero_regret() {
        let rep = run_experiment(&constant_config()).unwrap();
        assert_eq!(rep.rows.len(), 2);
        for r in &rep.rows {
            assert_eq!((r.mean_regret, r.stderr), (0.0, 0.0));
            assert!(r.pass);
        }
    }

    #[test]
    fn config_errors_carry_paths() {
        let err = ExperimentConfig::from_json(
            r#"{"class": {}, "learner": {"kind": "exp4"}, "adversary": {}, "horizons": [1], "trials": 1}"#,
        )
        .unwrap_err();
        match err {
            Error::Config { path, .. } => assert_eq!(path, "learner.kind"),
            e => panic!("{e:?}"),
        }
        let mut cfg = constant_config();
        cfg.horizons = vec![10, 10];
        match run_experiment(&cfg).unwrap_err() {
            Error::Config { path, .. } => assert_eq!(path, "horizons[1]"),
            e => panic!("{e:?}"),
        }
        cfg.horizons = vec![10];
        cfg.trials = 0;
        assert!(matches!(run_experiment(&cfg), Err(Error::Config { .. })));
        let mut cfg = constant_config();
        cfg.class = serde_json::json!({"arms": 2, "means": [[0.5, 2.0]]});
        assert!(matches!(run_experiment(&cfg), Err(Error::Config { .. })));
        let mut cfg = constant_config();
        cfg.learner.kind = LearnerKind::Alg2;
        match run_experiment(&cfg).unwrap_err() {
            Error::Config { path, .. } => assert_eq!(path, "learner.alpha"),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn mismatched_bound_is_a_config_error() {
        let mut cfg = constant_config();
        cfg.bound_checks = vec![BoundName::Alg2];
        assert!(matches!(run_experiment(&cfg), Err(Error::Config { .. })));
    }

    #[test]
    fn csv_shapes() {
        assert_eq!(csv_string(&[]), format!("{CSV_HEADER}\n"));
        let row = RegretRow {
            horizon: 1000,
            mean_regret: 123.456789012345,
            stderr: 0.1,
            trials: 5,
            bound_name: Some("exp3".into()),
            bound_value: Some(960.5),
            pass: true,
        };
        let text = csv_string(std::slice::from_ref(&row));
        assert_eq!(text.lines().count(), 2);
        assert!(!text.contains('\r'));
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "1000,1.234567890e2,1.000000000e-1,exp3,9.605000000e2,true"
        );
        let back = parse_csv(&text).unwrap();
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        assert!(rel(back[0].mean_regret, row.mean_regret) < 5e-10);
        assert_eq!(back[0].bound_name, row.bound_name);
    }

    #[test]
    fn report_is_deterministic_and_hash_stable() {
        let cfg = constant_config();
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert_eq!(a.metadata.config_hash.len(), 64);
        let mut other = cfg.clone();
        other.seed = 4;
        assert_ne!(other.hash().unwrap(), a.metadata.config_hash);
    }

    #[test]
    fn write_atomic_leaves_no_partial_file() {
        let dir = std::env::temp_dir().join(format!("nb-harness-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        let target = dir.join("out.csv");
        write_atomic(&target, "x\n").unwrap();
        assert_eq!(fs::read_to_string(&target).unwrap(), "x\n");
        assert!(!dir.join("out.csv.partial").exists());
        // Writing onto a directory fails and cleans up.
        let blocked = dir.join("sub");
        fs::create_dir_all(blocked.join("inner")).unwrap();
        assert!(write_atomic(&blocked, "y").is_err());
        assert!(!dir.join("sub.partial").exists());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn bound_values() {
        let p = Prepared::Exp3 { eta: None };
        let v = p.bound(BoundName::Exp3, 10, 10_000).unwrap();
        assert!((v - 2.0 * (1e5f64 * 10f64.ln()).sqrt()).abs() < 1e-9);
        assert!((v - 959.7).abs() < 0.1);
        let h = Prepared::Alg2 {
            set: HittingSet::new(0.1, vec![0, 1]),
            eta: None,
        };
        let v = h.bound(BoundName::Alg2, 5, 100).unwrap();
        assert!((v - (10.0 + 2.0 * (200f64 * 2f64.ln()).sqrt())).abs() < 1e-12);
    }
}
