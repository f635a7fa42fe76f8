use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use stratclass::costs::{scale_for_budget, validate_metric, CostKind, CostModel};
use stratclass::experiments::{
    generate_synthetic_population, run_angle_sweep, run_gaming_sweep, run_hybrid_sweep, write_rows,
    ExperimentConfig, FeatureSchema, DEFAULT_ALIGNMENT,
};
use stratclass::game::{jury_payoff, Classifier, Population, Search};
use stratclass::io::{read_json, read_population_file, write_json, write_population_file};
use stratclass::learners::{
    plain_accuracy, train_baseline_linear, train_min_separable_with, train_separable, GridOptions,
    SvmParams, DEFAULT_GRID_BUDGET,
};
use stratclass::oracle::{
    brute_force_optimum_with, sat_to_game, verify_reduction, CnfFormula, Mode, OracleOptions,
    DEFAULT_MAX_POINTS,
};
use stratclass::Error;

#[derive(Parser)]
#[command(
    name = "stratclass",
    version,
    about = "Gaming-robust classification toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a classifier to a population file.
    Train {
        #[arg(long, value_enum)]
        algo: Algo,
        /// Cost model (required for the robust learners).
        #[arg(long)]
        cost: Option<PathBuf>,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Baseline regularization.
        #[arg(long, default_value_t = SvmParams::default().reg)]
        reg: f64,
        #[arg(long, default_value_t = SvmParams::default().epochs)]
        epochs: usize,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Largest threshold grid the min-separable learner will scan.
        #[arg(long, default_value_t = DEFAULT_GRID_BUDGET)]
        budget: f64,
    },
    /// Accuracy of a model when the data best-responds under a cost.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        cost: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Gaming budget t; costs are multiplied by 2/t.
        #[arg(long, default_value_t = 2.0)]
        gaming: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Robustness sweeps against the baseline.
    Sweep {
        #[arg(value_enum)]
        kind: SweepKind,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config's worker count.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Exhaustive strategic optimum of a small population.
    Oracle {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        cost: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_POINTS)]
        max_points: usize,
    },
    /// Hardness instance for a 3-CNF formula, optionally verified.
    Sat {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        verify: bool,
        #[arg(long, value_enum, default_value_t = ModeArg::Full)]
        mode: ModeArg,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Synthetic two-class population over a feature schema.
    GenData {
        /// `default` or a schema JSON file.
        #[arg(long, default_value = "default")]
        schema: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4.0)]
        separation: f64,
        #[arg(long, default_value_t = DEFAULT_ALIGNMENT)]
        alignment: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a cost file (and the metric axioms for tables).
    ValidateCost {
        #[arg(long)]
        cost: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum, Serialize, Deserialize, Debug, PartialEq)]
#[serde(rename_all = "kebab-case")]
enum Algo {
    Separable,
    MinSeparable,
    Baseline,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    Gaming,
    Angle,
    Hybrid,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Restricted,
}

/// Model file: the classifier plus how it was obtained.
#[derive(Serialize, Deserialize)]
struct ModelFile {
    algo: Algo,
    classifier: Classifier<f64>,
    metadata: serde_json::Value,
}

/// Exit status for a failure: 1 usage, 2 data/format, 3 budget.
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::fmt::Debug for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<Usage>().is_some() {
        return 1;
    }
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(Error::BudgetExceeded { .. }) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Train {
            algo,
            cost,
            data,
            out,
            seed,
            reg,
            epochs,
            workers,
            budget,
        } => train(
            algo,
            cost.as_deref(),
            &data,
            &out,
            SvmParams {
                reg,
                epochs,
                seed,
                ..Default::default()
            },
            GridOptions { budget, workers },
        ),
        Command::Evaluate {
            model,
            cost,
            data,
            gaming,
            out,
        } => evaluate(&model, &cost, &data, gaming, out.as_deref()),
        Command::Sweep {
            kind,
            config,
            out,
            workers,
        } => sweep(kind, &config, &out, workers),
        Command::Oracle {
            data,
            cost,
            out,
            workers,
            max_points,
        } => {
            let pop = load_population(&data)?;
            let c = load_cost(&cost)?;
            let r = brute_force_optimum_with(
                &pop,
                &c,
                OracleOptions {
                    max_points,
                    workers: positive(workers, "--workers")?,
                },
            )?;
            write_json(&r, &out)?;
            println!(
                "optimum payoff {} over {} labelings",
                r.opt_payoff, r.evaluations
            );
            Ok(())
        }
        Command::Sat {
            cnf,
            k,
            verify,
            mode,
            out,
            workers,
        } => sat(&cnf, k, verify, mode, &out, workers),
        Command::GenData {
            schema,
            n,
            seed,
            separation,
            alignment,
            out,
        } => {
            let schema = if schema == "default" {
                FeatureSchema::default()
            } else {
                read_json::<FeatureSchema>(&schema)
                    .with_context(|| format!("reading schema {schema}"))?
            };
            let pop = generate_synthetic_population(&schema, n, seed, separation, alignment)?;
            write_population_file(&pop, &out)?;
            let pos = pop.labels().iter().filter(|l| l.is_pos()).count();
            println!(
                "wrote {} points ({pos} positive) in {} dimensions to {}",
                pop.len(),
                pop.dim(),
                out.display()
            );
            Ok(())
        }
        Command::ValidateCost { cost, out } => validate_cost(&cost, out.as_deref()),
    }
}

fn positive(v: usize, flag: &str) -> Result<usize> {
    if v == 0 {
        Err(usage(format!("{flag} must be at least 1")))
    } else {
        Ok(v)
    }
}

fn load_population(path: &Path) -> Result<Population<f64>> {
    read_population_file(path).with_context(|| format!("reading population {}", path.display()))
}

fn load_cost(path: &Path) -> Result<CostModel<f64>> {
    let c: CostModel<f64> =
        read_json(path).with_context(|| format!("reading cost {}", path.display()))?;
    c.validate()
        .with_context(|| format!("invalid cost {}", path.display()))?;
    Ok(c)
}

fn train(
    algo: Algo,
    cost: Option<&Path>,
    data: &Path,
    out: &Path,
    svm: SvmParams,
    grid: GridOptions,
) -> Result<()> {
    let pop = load_population(data)?;
    let samples = pop.samples();
    let cost_path = cost;
    let cost = || -> Result<CostModel<f64>> {
        load_cost(cost_path.ok_or_else(|| usage("--cost is required for the robust learners"))?)
    };
    let (classifier, metadata) = match algo {
        Algo::Separable => {
            let r = train_separable(&samples, &cost()?)?;
            println!(
                "threshold {} (effective {}), empirical error {}",
                r.threshold, r.effective_threshold, r.empirical_err
            );
            let meta = serde_json::json!({
                "seed": svm.seed,
                "threshold": r.threshold,
                "effective_threshold": r.effective_threshold,
                "empirical_error": r.empirical_err,
                "candidates": r.candidate_thresholds.len(),
            });
            (r.classifier, meta)
        }
        Algo::MinSeparable => {
            positive(grid.workers, "--workers")?;
            let r = train_min_separable_with(&samples, &cost()?, grid)?;
            let shown: Vec<String> = r.threshold_vector.iter().map(ToString::to_string).collect();
            println!(
                "thresholds [{}], empirical error {}, grid {}",
                shown.join(", "),
                r.empirical_err,
                r.grid_size
            );
            let meta = serde_json::json!({
                "seed": svm.seed,
                "threshold_vector": r.threshold_vector,
                "published": r.published,
                "realized_minima": r.realized_minima,
                "empirical_error": r.empirical_err,
                "grid_size": r.grid_size.to_string(),
            });
            (r.classifier, meta)
        }
        Algo::Baseline => {
            if cost_path.is_some() {
                log::warn!("--cost is ignored by the baseline");
            }
            let m = train_baseline_linear(&samples, svm)?;
            let f = m.classifier();
            let acc = plain_accuracy(&f, &samples)?;
            println!(
                "baseline training accuracy {acc}{}",
                if m.single_class {
                    " (single class)"
                } else {
                    ""
                }
            );
            let meta = serde_json::json!({
                "seed": svm.seed,
                "hyperparameters": m.params,
                "training_accuracy": acc,
                "empirical_error": 1.0 - acc,
                "single_class": m.single_class,
            });
            (f, meta)
        }
    };
    write_json(
        &ModelFile {
            algo,
            classifier,
            metadata,
        },
        out,
    )?;
    Ok(())
}

#[derive(Serialize)]
struct EvaluationReport {
    gaming: f64,
    accuracy: f64,
    no_gaming_accuracy: f64,
    points: usize,
}

fn evaluate(model: &Path, cost: &Path, data: &Path, gaming: f64, out: Option<&Path>) -> Result<()> {
    if !(gaming.is_finite() && gaming > 0.0) {
        return Err(usage(format!("--gaming must be positive, got {gaming}")));
    }
    let m: ModelFile =
        read_json(model).with_context(|| format!("reading model {}", model.display()))?;
    let pop = load_population(data)?;
    let c = load_cost(cost)?;
    let scaled = scale_for_budget(&c, &gaming)?;
    let accuracy = jury_payoff(&m.classifier, &scaled, &pop, Search::Auto)?;
    let mut hit = 0;
    for i in 0..pop.len() {
        if m.classifier.predict(pop.site(i))? == pop.labels()[i] {
            hit += 1;
        }
    }
    let report = EvaluationReport {
        gaming,
        accuracy,
        no_gaming_accuracy: hit as f64 / pop.len() as f64,
        points: pop.len(),
    };
    println!(
        "accuracy under gaming t={gaming}: {} (without gaming {})",
        report.accuracy, report.no_gaming_accuracy
    );
    if let Some(out) = out {
        write_json(&report, out)?;
    }
    Ok(())
}

fn sweep(kind: SweepKind, config: &Path, out: &Path, workers: Option<usize>) -> Result<()> {
    let mut cfg: ExperimentConfig =
        read_json(config).with_context(|| format!("reading config {}", config.display()))?;
    if let Some(w) = workers {
        cfg.workers = positive(w, "--workers")?;
    }
    let rows = match kind {
        SweepKind::Gaming => run_gaming_sweep(&cfg)?,
        SweepKind::Angle => run_angle_sweep(&cfg)?,
        SweepKind::Hybrid => run_hybrid_sweep(&cfg)?,
    };
    write_rows(
        &rows,
        fs::File::create(out).with_context(|| format!("creating {}", out.display()))?,
    )?;
    let mut methods: Vec<&str> = rows.iter().map(|r| r.method.as_str()).collect();
    methods.dedup();
    for method in methods {
        let acc: Vec<f64> = rows
            .iter()
            .filter(|r| r.method == method)
            .map(|r| r.accuracy)
            .collect();
        println!(
            "{method}: {} rows, mean accuracy {:.4}",
            acc.len(),
            acc.iter().sum::<f64>() / acc.len() as f64
        );
    }
    Ok(())
}

fn sat(cnf: &Path, k: u64, verify: bool, mode: ModeArg, out: &Path, workers: usize) -> Result<()> {
    let text = fs::read_to_string(cnf).with_context(|| format!("reading {}", cnf.display()))?;
    let formula = CnfFormula::parse_dimacs(&text)?;
    let inst = sat_to_game::<f64>(&formula, k)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_population_file(&inst.population, out.join("population.csv"))?;
    write_json(&inst.metric, out.join("cost.json"))?;
    write_json(&inst.index_map, out.join("index_map.json"))?;
    write_json(&inst, out.join("instance.json"))?;
    println!(
        "{} points, K = {}, M = {}",
        inst.population.len(),
        inst.k,
        inst.big_m
    );
    if verify {
        let mode = match mode {
            ModeArg::Full => Mode::Full,
            ModeArg::Restricted => Mode::Restricted,
        };
        let opts = OracleOptions {
            workers: positive(workers, "--workers")?,
            ..Default::default()
        };
        let r = verify_reduction::<f64>(&formula, k, mode, opts)?;
        write_json(&r, out.join("report.json"))?;
        println!(
            "{} formula: optimum {}, baseline {}, predicted {}: {}",
            if r.satisfiable {
                "satisfiable"
            } else {
                "unsatisfiable"
            },
            r.optimum,
            r.baseline,
            r.predicted,
            if r.pass { "pass" } else { "FAIL" }
        );
    } else if !matches!(mode, ModeArg::Full) {
        bail!(usage("--mode only applies with --verify"));
    }
    Ok(())
}

#[derive(Serialize)]
struct CostReport {
    kind: &'static str,
    valid: bool,
    error: Option<String>,
    metric: Option<stratclass::costs::MetricCheckReport>,
}

fn validate_cost(path: &Path, out: Option<&Path>) -> Result<()> {
    let c: CostModel<f64> =
        read_json(path).with_context(|| format!("reading cost {}", path.display()))?;
    let kind = match &c.kind {
        CostKind::Linear { .. } => "linear",
        CostKind::Separable(_) => "separable",
        CostKind::MinSeparable { .. } => "min_separable",
        CostKind::Tabular { .. } => "tabular",
        CostKind::MixedTrue { .. } => "mixed",
    };
    let check = c.validate();
    let metric = match c.tabular_matrix() {
        Some(m) if check.is_ok() => Some(validate_metric(m)?),
        _ => None,
    };
    let report = CostReport {
        kind,
        valid: check.is_ok(),
        error: check.as_ref().err().map(ToString::to_string),
        metric,
    };
    println!(
        "{kind} cost: {}",
        if report.valid { "valid" } else { "invalid" }
    );
    if let Some(m) = &report.metric {
        println!(
            "metric: {} (symmetric {}, {} triangle violations)",
            m.is_metric, m.symmetry_ok, m.violation_count
        );
    }
    if let Some(out) = out {
        write_json(&report, out)?;
    }
    check.map_err(Into::into)
}
