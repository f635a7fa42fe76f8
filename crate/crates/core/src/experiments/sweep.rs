use std::cmp::Ordering;
use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::data::{
    generate_synthetic_population, normalize_features, train_test_split, DEFAULT_ALIGNMENT,
};
use super::gaming::{accuracy_under_gaming, perturb_direction, sin_angle};
use super::schema::FeatureSchema;
use crate::costs::{CostModel, SeparableCost};
use crate::error::{Error, Result};
use crate::game::{Classifier, Population, Sample};
use crate::learners::{
    hybrid_direction, plain_accuracy, train_baseline_linear, train_separable,
    train_threshold_with_margin, BaselineModel, SvmParams,
};

pub const METHOD_BASELINE: &str = "svm";
pub const METHOD_ROBUST: &str = "robust";
pub const METHOD_HYBRID: &str = "hybrid";
/// `gamma` of rows that are not hybrids.
pub const GAMMA_NONE: f64 = -1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DataSource {
    Synthetic,
    /// Population CSV; split 70/30 per seed.
    Csv {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Weights of the squared-distance term in the true cost.
    pub epsilons: Vec<f64>,
    /// Angle between true and assumed cost directions for the gaming and
    /// hybrid sweeps.
    pub sin_theta: f64,
    pub sin_theta_grid: Vec<f64>,
    pub gaming_grid: Vec<f64>,
    pub gamma_grid: Vec<f64>,
    /// Gaming budget of the angle sweep.
    pub fixed_gaming: f64,
    pub seeds: Vec<u64>,
    pub n_train: usize,
    pub n_test: usize,
    pub class_separation: f64,
    pub alignment: f64,
    pub schema: FeatureSchema,
    pub data: DataSource,
    pub svm: SvmParams,
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            epsilons: vec![0.0, 0.1, 0.2],
            sin_theta: 0.394,
            sin_theta_grid: (0..=6).map(|i| i as f64 / 10.0).collect(),
            gaming_grid: (0..=10).map(|i| i as f64 * 0.25).collect(),
            gamma_grid: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            fixed_gaming: 1.0,
            seeds: vec![0],
            n_train: 1400,
            n_test: 600,
            class_separation: 4.0,
            alignment: DEFAULT_ALIGNMENT,
            schema: FeatureSchema::default(),
            data: DataSource::Synthetic,
            svm: SvmParams::default(),
            workers: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.schema.validate()?;
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::invalid(what.to_string()))
            }
        };
        check(
            !self.epsilons.is_empty() && self.epsilons.iter().all(|e| (0.0..=1.0).contains(e)),
            "epsilons must be a nonempty list in [0,1]",
        )?;
        check(
            (0.0..1.0).contains(&self.sin_theta),
            "sin_theta must lie in [0,1)",
        )?;
        check(
            !self.sin_theta_grid.is_empty()
                && self.sin_theta_grid.iter().all(|s| (0.0..1.0).contains(s)),
            "sin_theta_grid must be a nonempty list in [0,1)",
        )?;
        check(
            !self.gaming_grid.is_empty()
                && self.gaming_grid.iter().all(|t| t.is_finite() && *t >= 0.0),
            "gaming_grid must be a nonempty list of non-negative budgets",
        )?;
        check(
            !self.gamma_grid.is_empty() && self.gamma_grid.iter().all(|g| (0.0..=1.0).contains(g)),
            "gamma_grid must be a nonempty list in [0,1]",
        )?;
        check(
            self.fixed_gaming.is_finite() && self.fixed_gaming >= 0.0,
            "fixed_gaming must be non-negative",
        )?;
        check(!self.seeds.is_empty(), "seeds must be nonempty")?;
        check(
            self.n_train >= 10 && self.n_test >= 10,
            "n_train and n_test must be at least 10",
        )?;
        check(
            self.class_separation.is_finite() && self.class_separation >= 0.0,
            "class_separation must be non-negative",
        )?;
        check(
            (0.0..=1.0).contains(&self.alignment),
            "alignment must lie in [0,1]",
        )?;
        check(self.workers >= 1, "workers must be at least 1")?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub method: String,
    pub t: f64,
    pub epsilon: f64,
    /// Achieved sine between the true and assumed cost directions.
    pub sin_theta: f64,
    /// Hybrid mixing weight, [`GAMMA_NONE`] otherwise.
    pub gamma: f64,
    pub accuracy: f64,
    pub seed: u64,
}

/// One seed's normalized train/test data and fitted baseline.
struct Prepared {
    seed: u64,
    alpha: Vec<f64>,
    train: Vec<Sample<f64>>,
    test: Population<f64>,
    baseline: BaselineModel,
}

fn prepare(cfg: &ExperimentConfig, seed: u64) -> Result<Prepared> {
    let (train, test) = match &cfg.data {
        DataSource::Synthetic => {
            let pop = generate_synthetic_population(
                &cfg.schema,
                cfg.n_train + cfg.n_test,
                seed,
                cfg.class_separation,
                cfg.alignment,
            )?;
            train_test_split(&pop, cfg.n_train, seed)?
        }
        DataSource::Csv { path } => {
            let pop: Population<f64> = crate::io::read_population_file(path)?;
            if pop.dim() != cfg.schema.dim() {
                return Err(Error::DimensionMismatch {
                    expected: cfg.schema.dim(),
                    got: pop.dim(),
                });
            }
            let n_train = (pop.len() as f64 * 0.7).round() as usize;
            train_test_split(&pop, n_train, seed)?
        }
    };
    let (train, norm) = normalize_features(&train)?;
    let test = norm.apply(&test)?;
    let train = train.samples();
    let baseline = train_baseline_linear(&train, SvmParams { seed, ..cfg.svm })?;
    Ok(Prepared {
        seed,
        alpha: cfg.schema.alpha(),
        train,
        test,
        baseline,
    })
}

/// Robust threshold on `⟨direction, x⟩` for budget `t`; `t = 0` is plain ERM.
fn robust_classifier(train: &[Sample<f64>], direction: &[f64], t: f64) -> Result<Classifier<f64>> {
    if t == 0.0 {
        let part = SeparableCost::from_linear(direction.to_vec());
        return Ok(train_threshold_with_margin(train, &part, &1.0, &0.0)?.classifier);
    }
    let c = CostModel::linear(direction.to_vec()).with_scale(2.0 / t);
    Ok(train_separable(train, &c)?.classifier)
}

fn accuracy(f: &Classifier<f64>, p: &Prepared, epsilon: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        plain_accuracy(f, &p.test.samples())
    } else {
        accuracy_under_gaming(f, &p.test, &CostModel::mixed(p.alpha.clone(), epsilon), t)
    }
}

fn prepare_all(cfg: &ExperimentConfig) -> Result<Vec<Prepared>> {
    cfg.seeds.par_iter().map(|&s| prepare(cfg, s)).collect()
}

/// Runs `job` over the grid on `cfg.workers` threads and sorts the rows.
fn run<J>(
    cfg: &ExperimentConfig,
    jobs: Vec<J>,
    job: impl Fn(&[Prepared], J) -> Result<Vec<SweepRow>> + Sync,
) -> Result<Vec<SweepRow>>
where
    J: Send,
{
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    pool.install(|| {
        let prepared = prepare_all(cfg)?;
        let chunks: Vec<Vec<SweepRow>> = jobs
            .into_par_iter()
            .map(|j| job(&prepared, j))
            .collect::<Result<_>>()?;
        let mut rows: Vec<SweepRow> = chunks.into_iter().flatten().collect();
        rows.sort_by(row_order);
        Ok(rows)
    })
}

fn row_order(a: &SweepRow, b: &SweepRow) -> Ordering {
    a.method
        .cmp(&b.method)
        .then(a.epsilon.total_cmp(&b.epsilon))
        .then(a.sin_theta.total_cmp(&b.sin_theta))
        .then(a.gamma.total_cmp(&b.gamma))
        .then(a.t.total_cmp(&b.t))
        .then(a.seed.cmp(&b.seed))
}

/// Baseline and robust classifier across the gaming grid, for every ε and
/// seed, with the assumed direction at `sin_theta`.
pub fn run_gaming_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let jobs: Vec<(usize, f64)> = (0..cfg.seeds.len())
        .flat_map(|s| cfg.gaming_grid.iter().map(move |&t| (s, t)))
        .collect();
    run(cfg, jobs, |prep, (s, t)| {
        compare_at(cfg, &prep[s], cfg.sin_theta, t)
    })
}

/// As [`run_gaming_sweep`] with the budget fixed and the angle varying.
pub fn run_angle_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let jobs: Vec<(usize, f64)> = (0..cfg.seeds.len())
        .flat_map(|s| cfg.sin_theta_grid.iter().map(move |&a| (s, a)))
        .collect();
    run(cfg, jobs, |prep, (s, a)| {
        compare_at(cfg, &prep[s], a, cfg.fixed_gaming)
    })
}

fn compare_at(cfg: &ExperimentConfig, p: &Prepared, target: f64, t: f64) -> Result<Vec<SweepRow>> {
    let assumed = perturb_direction(&p.alpha, target, p.seed)?;
    let sin_theta = sin_angle(&p.alpha, &assumed);
    let robust = robust_classifier(&p.train, &assumed, t)?;
    let svm = p.baseline.classifier();
    let mut rows = Vec::with_capacity(2 * cfg.epsilons.len());
    for &epsilon in &cfg.epsilons {
        for (method, f) in [(METHOD_BASELINE, &svm), (METHOD_ROBUST, &robust)] {
            let accuracy = accuracy(f, p, epsilon, t)?;
            rows.push(SweepRow {
                method: method.into(),
                t,
                epsilon,
                sin_theta,
                gamma: GAMMA_NONE,
                accuracy,
                seed: p.seed,
            });
        }
    }
    Ok(rows)
}

/// Robust classifiers on `(1−γ)α′ + γβ` (β the baseline weights) across the
/// gaming grid, plus the raw baseline rows.
pub fn run_hybrid_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let jobs: Vec<(usize, f64)> = (0..cfg.seeds.len())
        .flat_map(|s| cfg.gaming_grid.iter().map(move |&t| (s, t)))
        .collect();
    run(cfg, jobs, |prep, (s, t)| {
        let p = &prep[s];
        let assumed = perturb_direction(&p.alpha, cfg.sin_theta, p.seed)?;
        let sin_theta = sin_angle(&p.alpha, &assumed);
        let svm = p.baseline.classifier();
        let hybrids = cfg
            .gamma_grid
            .iter()
            .map(|&g| {
                Ok((
                    g,
                    robust_classifier(
                        &p.train,
                        &hybrid_direction(&assumed, &p.baseline.w, &g)?,
                        t,
                    )?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut rows = Vec::new();
        for &epsilon in &cfg.epsilons {
            let row = |method: &str, gamma: f64, accuracy: f64| SweepRow {
                method: method.into(),
                t,
                epsilon,
                sin_theta,
                gamma,
                accuracy,
                seed: p.seed,
            };
            rows.push(row(
                METHOD_BASELINE,
                GAMMA_NONE,
                accuracy(&svm, p, epsilon, t)?,
            ));
            for (g, f) in &hybrids {
                rows.push(row(METHOD_HYBRID, *g, accuracy(f, p, epsilon, t)?));
            }
        }
        Ok(rows)
    })
}

/// CSV with header `method,t,epsilon,sin_theta,gamma,accuracy,seed`.
pub fn write_rows<W: Write>(rows: &[SweepRow], writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for r in rows {
        wtr.serialize(r)?;
    }
    if rows.is_empty() {
        wtr.write_record([
            "method",
            "t",
            "epsilon",
            "sin_theta",
            "gamma",
            "accuracy",
            "seed",
        ])?;
    }
    wtr.flush()?;
    Ok(())
}
