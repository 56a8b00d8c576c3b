use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use noisy_bandit::complexity::{
    gamma, gamma_convex, gamma_with, tune_alpha_with, ConvexOptions, SolveOptions, TuneRule,
};
use noisy_bandit::counterexamples::{
    escape_function, example2_parameters, generate_candidates, massart_check, verify_escape,
    CandidateKind, PartitionInstance, DEFAULT_MAX_RETRIES,
};
use noisy_bandit::covers::{
    exact_hitting_set, greedy_distribution_cover, greedy_hitting_set, witness_to_hitting_set,
    DEFAULT_SUBSET_BUDGET,
};
use noisy_bandit::environments::ArmLayout;
use noisy_bandit::harness::{
    emit_csv, run_experiment_in, run_lower_bound, write_atomic, ExperimentConfig, LearnerConfig,
};
use noisy_bandit::{Error, FunctionClass, Result};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "noisy-bandit",
    version,
    about = "Maximin volumes, covers and regret experiments for adversarial bandits"
)]
struct Cli {
    /// Base seed for every random choice.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the number of Monte-Carlo trials.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Directory for CSV/JSON artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generalized maximin volume of a class.
    Gamma {
        class: PathBuf,
        #[arg(long)]
        alpha: f64,
        /// Use the simplex-grid restriction of the convex hull.
        #[arg(long)]
        convex: bool,
        #[arg(long, default_value_t = 2)]
        grid_resolution: usize,
    },
    /// Finite alpha-hitting set.
    HittingSet {
        class: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = HitMethod::Greedy)]
        method: HitMethod,
        /// Largest set the exact search tries.
        #[arg(long, default_value_t = 6)]
        max_size: usize,
    },
    /// Greedy (alpha, beta)-distribution cover.
    DistCover {
        class: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
    },
    /// Run an experiment config and check its regret bounds.
    Simulate { config: PathBuf },
    /// Regret of a learner on the two-environment hard instance.
    Lowerbound {
        #[arg(long, value_delimiter = ',', default_values_t = [1000usize, 10000])]
        horizons: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        s1: usize,
        #[arg(long, default_value_t = 1)]
        s2: usize,
        #[arg(long, default_value_t = 0)]
        others: usize,
        /// Learner block as JSON, e.g. '{"kind":"exp3"}'.
        #[arg(long)]
        learner: Option<String>,
    },
    /// Build a cover-escaping function for a set of candidate distributions.
    Counterexample(CounterexampleArgs),
    /// Pick the threshold for a horizon from a grid of candidates.
    TuneAlpha {
        class: PathBuf,
        #[arg(long)]
        horizon: usize,
        /// Increasing thresholds in (0, 1); defaults to 0.01, 0.02, ..., 0.99.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value_t = Rule::Smallest)]
        rule: Rule,
        /// Evaluate the plain volume instead of the convexified one.
        #[arg(long)]
        plain: bool,
        #[arg(long, default_value_t = 2)]
        grid_resolution: usize,
    },
}

#[derive(Args)]
struct CounterexampleArgs {
    /// Number of generated candidates (ignored with --candidates).
    #[arg(long = "N", default_value_t = 2)]
    n: usize,
    /// Partition depth; derived from N when absent.
    #[arg(long = "M")]
    m: Option<u32>,
    /// JSON list of candidate distributions over the 3^M intervals.
    #[arg(long)]
    candidates: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Generator::Exponential)]
    generator: Generator,
    #[arg(long, default_value_t = 10_000)]
    draws: usize,
    #[arg(long, default_value_t = 0.25)]
    alpha: f64,
    #[arg(long, default_value_t = 0.3)]
    beta: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum HitMethod {
    Greedy,
    Exact,
    Witness,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Smallest,
    Minimize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    Uniform,
    Geometric,
    Exponential,
}

enum Outcome {
    Pass,
    BoundFailed,
}

fn read_class(path: &Path) -> Result<FunctionClass> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    FunctionClass::from_json(&text).map_err(|e| Error::Config {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn stdout(text: &str) {
    let mut out = io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn emit(cli: &Cli, name: &str, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    if let Some(dir) = &cli.out {
        write_atomic(&dir.join(name), &text)?;
    }
    stdout(&text);
    Ok(())
}

fn run(cli: &Cli) -> Result<Outcome> {
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Gamma {
            class,
            alpha,
            convex,
            grid_resolution,
        } => {
            let c = read_class(class)?;
            let value = if *convex {
                let s = gamma_convex(
                    &c,
                    *alpha,
                    &ConvexOptions::with_resolution(*grid_resolution),
                )?;
                json!({
                    "alpha": alpha,
                    "convex": true,
                    "grid_resolution": s.grid_resolution,
                    "n_mixtures": s.n_mixtures,
                    "upper_bound": s.upper_bound,
                    "value": s.value,
                    "witness": s.witness,
                    "dual_witness": s.dual_support.iter().map(|(w, p)| json!({"weights": w, "probability": p})).collect::<Vec<_>>(),
                    "duality_gap": s.duality_gap,
                })
            } else {
                let s = gamma(&c, *alpha)?;
                json!({
                    "alpha": alpha,
                    "convex": false,
                    "value": s.value,
                    "witness": s.witness,
                    "dual_witness": s.dual_witness,
                    "duality_gap": s.duality_gap,
                })
            };
            emit(cli, "gamma.json", &value)?;
        }
        Command::HittingSet {
            class,
            alpha,
            method,
            max_size,
        } => {
            let c = read_class(class)?;
            let h = match method {
                HitMethod::Greedy => greedy_hitting_set(&c, *alpha)?,
                HitMethod::Exact => exact_hitting_set(
                    &c,
                    *alpha,
                    (*max_size).min(c.n_arms()),
                    DEFAULT_SUBSET_BUDGET,
                )?
                .ok_or_else(|| {
                    Error::Resource(format!("no hitting set with at most {max_size} arms"))
                })?,
                HitMethod::Witness => {
                    let s = gamma_with(&c, *alpha, &SolveOptions::default())?;
                    witness_to_hitting_set(&s.witness, s.value, &c, *alpha)?
                }
            };
            emit(
                cli,
                "hitting_set.json",
                &json!({"alpha": h.alpha, "beta": 0.0, "arms": h.arms}),
            )?;
        }
        Command::DistCover { class, alpha, beta } => {
            let c = read_class(class)?;
            let cover = greedy_distribution_cover(&c, *alpha, *beta)?;
            emit(cli, "dist_cover.json", &serde_json::to_value(&cover)?)?;
        }
        Command::Simulate { config } => {
            let mut cfg = ExperimentConfig::load(config)?;
            if let Some(t) = cli.trials {
                cfg.trials = t;
            }
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let base = config.parent().unwrap_or(Path::new("."));
            let report = run_experiment_in(&cfg, base)?;
            let (csv, json_path) = match &cli.out {
                Some(dir) => (Some(dir.join("report.csv")), Some(dir.join("report.json"))),
                None => (
                    cfg.output.csv.as_ref().map(|p| base.join(p)),
                    cfg.output.json.as_ref().map(|p| base.join(p)),
                ),
            };
            if let Some(p) = csv {
                emit_csv(&report.rows, &p)?;
            }
            if let Some(p) = json_path {
                write_atomic(&p, &report.to_json()?)?;
            }
            stdout(&report.to_json()?);
            if !report.all_pass() {
                return Ok(Outcome::BoundFailed);
            }
        }
        Command::Lowerbound {
            horizons,
            s1,
            s2,
            others,
            learner,
        } => {
            let learner = match learner {
                Some(text) => {
                    serde_json::from_str::<LearnerConfig>(text).map_err(|e| Error::Config {
                        path: "--learner".into(),
                        message: e.to_string(),
                    })?
                }
                None => LearnerConfig::exp3(),
            };
            let layout = ArmLayout {
                s1: *s1,
                s2: *s2,
                others: *others,
            };
            let report =
                run_lower_bound(horizons, layout, &learner, cli.trials.unwrap_or(500), seed)?;
            if let Some(dir) = &cli.out {
                emit_csv(&report.regret_rows(), &dir.join("lowerbound.csv"))?;
                write_atomic(&dir.join("lowerbound.json"), &report.to_json()?)?;
            }
            stdout(&report.to_json()?);
            if !report.all_pass() {
                return Ok(Outcome::BoundFailed);
            }
        }
        Command::Counterexample(args) => {
            let value = counterexample(args, seed)?;
            emit(cli, "counterexample.json", &value)?;
        }
        Command::TuneAlpha {
            class,
            horizon,
            grid,
            rule,
            plain,
            grid_resolution,
        } => {
            let c = read_class(class)?;
            let grid = grid
                .clone()
                .unwrap_or_else(|| (1..100).map(|i| i as f64 / 100.0).collect());
            let rule = match rule {
                Rule::Smallest => TuneRule::SmallestAdmissible,
                Rule::Minimize => TuneRule::MinimizeBound,
            };
            let opts = ConvexOptions::with_resolution(*grid_resolution);
            let volume = |a: f64| -> f64 {
                let v = if *plain {
                    gamma(&c, a).map(|s| s.value)
                } else {
                    gamma_convex(&c, a, &opts).map(|s| s.value)
                };
                v.unwrap_or(0.0)
            };
            let choice = tune_alpha_with(volume, *horizon, &grid, rule)?;
            emit(
                cli,
                "tune_alpha.json",
                &json!({
                    "horizon": horizon,
                    "alpha": choice.alpha,
                    "gamma": choice.gamma,
                    "estimation": choice.estimation,
                    "sampled_arms": choice.sampled_arms,
                }),
            )?;
        }
    }
    Ok(Outcome::Pass)
}

fn counterexample(args: &CounterexampleArgs, seed: u64) -> Result<Value> {
    let (candidates, depth) = match &args.candidates {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            let cands: Vec<Vec<f64>> = serde_json::from_str(&text).map_err(|e| Error::Config {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            let depth = match args.m {
                Some(m) => m,
                None => example2_parameters(cands.len())?,
            };
            (cands, depth)
        }
        None => {
            let depth = match args.m {
                Some(m) => m,
                None => example2_parameters(args.n)?,
            };
            let kind = match args.generator {
                Generator::Uniform => CandidateKind::Uniform,
                Generator::Geometric => CandidateKind::Geometric { ratio: 0.999 },
                Generator::Exponential => CandidateKind::Exponential,
            };
            (generate_candidates(kind, args.n, depth, seed)?, depth)
        }
    };
    let instance = PartitionInstance::new(depth, candidates)?;
    let esc = escape_function(&instance, seed, DEFAULT_MAX_RETRIES)?;
    let check = verify_escape(&esc.function, &instance, args.alpha, args.beta)?;
    let massart = massart_check(&instance, args.draws, seed)?;
    Ok(json!({
        "N": instance.n_candidates,
        "M": depth,
        "pruned": instance.n_pruned(),
        "attempts": esc.attempts,
        "max_correlation": esc.max_correlation,
        "f_values": esc.function.f2_values(),
        "per_candidate_coverage": check.per_candidate_coverage,
        "margin": check.margin,
        "massart_bound": massart.massart_bound,
        "empirical_mean": massart.empirical_mean,
        "empirical_stderr": massart.stderr,
    }))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotLearnable(_)
        | Error::ProbabilisticFailure { .. }
        | Error::CounterexampleInvalid(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::BoundFailed) => {
            eprintln!("bound check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
