//! Repeated k-fold cross-validation of one method on one block combination.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::folds::{make_fold_plan, make_stratified_fold_plan, FoldPlan};
use super::metrics::{gcr, lcc};
use crate::error::{Error, Result};
use crate::ga::{evolve, GaConfig, Targets};
use crate::linear::{train_svm, train_svr, LinearModel, Task, TrainConfig};
use crate::rng::{self, tag};
use crate::store::{
    canonical_rank, concat_blocks, DatasetManifest, FeatureBlock, Label, Standardizer,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Svm,
    Svr,
    Ga,
}

impl Method {
    /// The linear baseline for a task.
    pub fn baseline(task: Task) -> Method {
        match task {
            Task::Classification => Method::Svm,
            Task::Regression => Method::Svr,
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "svm" => Ok(Method::Svm),
            "svr" => Ok(Method::Svr),
            "ga" => Ok(Method::Ga),
            other => Err(format!("unknown method {other:?}")),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Svm => "svm",
            Method::Svr => "svr",
            Method::Ga => "ga",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Gcr,
    Lcc,
}

impl Metric {
    pub fn for_task(task: Task) -> Metric {
        match task {
            Task::Classification => Metric::Gcr,
            Task::Regression => Metric::Lcc,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolConfig {
    pub rounds: usize,
    pub folds: usize,
    /// Master seed; fold plans and every per-fold training seed derive from it.
    pub seed: u64,
    pub stratified: bool,
    pub train: TrainConfig,
    /// GA settings; `None` uses the task defaults. The `seed` and `task`
    /// fields are overwritten per fold.
    pub ga: Option<GaConfig>,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            rounds: 10,
            folds: 10,
            seed: 0,
            stratified: false,
            train: TrainConfig::default(),
            ga: None,
        }
    }
}

/// A manifest with its blocks loaded, in canonical order.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub manifest: DatasetManifest,
    pub blocks: Vec<FeatureBlock>,
}

impl Dataset {
    pub fn load(manifest: DatasetManifest) -> Result<Self> {
        let blocks = manifest
            .block_names()
            .iter()
            .map(|name| manifest.load_block(name))
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset { manifest, blocks })
    }

    pub fn from_parts(manifest: DatasetManifest, mut blocks: Vec<FeatureBlock>) -> Result<Self> {
        for b in &blocks {
            if b.n_rows() != manifest.n_samples() {
                return Err(Error::RowCount {
                    context: format!("block {}", b.name()),
                    expected: manifest.n_samples(),
                    found: b.n_rows(),
                });
            }
        }
        blocks.sort_by(|a, b| {
            canonical_rank(a.name())
                .cmp(&canonical_rank(b.name()))
                .then_with(|| a.name().cmp(b.name()))
        });
        Ok(Dataset { manifest, blocks })
    }

    pub fn block_names(&self) -> Vec<String> {
        self.blocks.iter().map(|b| b.name().to_owned()).collect()
    }

    /// Concatenation of the named blocks, in canonical order.
    pub fn features(&self, names: &[String]) -> Result<FeatureBlock> {
        let mut chosen = Vec::with_capacity(names.len());
        for b in &self.blocks {
            if names.iter().any(|n| n == b.name()) {
                chosen.push(b.clone());
            }
        }
        if let Some(missing) = names
            .iter()
            .find(|n| !self.blocks.iter().any(|b| b.name() == n.as_str()))
        {
            return Err(Error::Config(format!(
                "dataset {} has no block {missing}",
                self.manifest.dataset_name
            )));
        }
        concat_blocks(&chosen)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selected_features: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundReport {
    pub round: usize,
    pub folds: Vec<FoldReport>,
    /// Mean over this round's folds.
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub dataset: String,
    pub blocks: Vec<String>,
    pub n_features: usize,
    pub method: Method,
    pub task: Task,
    pub metric: Metric,
    pub seed: u64,
    pub rounds: Vec<RoundReport>,
    /// Mean of the per-round means.
    pub mean: f64,
    /// Sample standard deviation of the per-round means (0 for one round).
    pub std: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_selected_features: Option<f64>,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }
}

/// What a fold saw; handed to a [`FoldObserver`] after each fold.
#[derive(Debug)]
pub struct FoldAudit<'a> {
    pub round: usize,
    pub fold: usize,
    pub train: &'a [usize],
    pub test: &'a [usize],
    pub standardizer: &'a Standardizer,
    pub predictions: &'a [f64],
}

/// Hook for inspecting each fold, e.g. to audit that no test row reached the
/// standardizer. Called from worker threads.
pub trait FoldObserver: Sync {
    fn on_fold(&self, audit: &FoldAudit<'_>);
}

impl FoldObserver for () {
    fn on_fold(&self, _: &FoldAudit<'_>) {}
}

enum TaskTargets {
    Labels(Vec<Label>),
    Scores(Vec<f64>),
}

/// Fold plans for every round. Classification data may be stratified.
pub fn fold_plans(
    n: usize,
    labels: Option<&[Label]>,
    config: &ProtocolConfig,
) -> Result<Vec<FoldPlan>> {
    (0..config.rounds)
        .map(|round| {
            let seed = rng::derive_seed(config.seed, &[tag::FOLD_PLAN, round as u64]);
            match labels {
                Some(l) if config.stratified => {
                    make_stratified_fold_plan(l, config.folds, round, seed)
                }
                _ => make_fold_plan(n, config.folds, round, seed),
            }
        })
        .collect()
}

pub fn run_protocol(
    dataset: &Dataset,
    blocks: &[String],
    method: Method,
    task: Task,
    config: &ProtocolConfig,
) -> Result<EvalReport> {
    run_protocol_observed(dataset, blocks, method, task, config, &())
}

/// Runs `config.rounds` rounds of `config.folds`-fold cross-validation.
///
/// Per fold: fit the standardizer on the training rows only, train the
/// method, predict the test rows and score them (GCR for classification,
/// LCC for regression). Folds run in parallel; every random choice derives
/// from the master seed and the (round, fold) coordinates.
pub fn run_protocol_observed(
    dataset: &Dataset,
    blocks: &[String],
    method: Method,
    task: Task,
    config: &ProtocolConfig,
    observer: &dyn FoldObserver,
) -> Result<EvalReport> {
    match (method, task) {
        (Method::Svm, Task::Regression) | (Method::Svr, Task::Classification) => {
            return Err(Error::Config(format!(
                "method {method} cannot run a {task} task"
            )))
        }
        _ => {}
    }
    config.train.validate()?;
    let x = dataset.features(blocks)?;
    let targets = match task {
        Task::Classification => TaskTargets::Labels(dataset.manifest.class_labels()?),
        Task::Regression => TaskTargets::Scores(dataset.manifest.scores()),
    };
    let labels = match &targets {
        TaskTargets::Labels(l) => Some(l.as_slice()),
        TaskTargets::Scores(_) => None,
    };
    let plans = fold_plans(x.n_rows(), labels, config)?;
    let mut ga_base = config
        .ga
        .clone()
        .unwrap_or_else(|| GaConfig::for_task(task));
    ga_base.task = task;
    if method == Method::Ga {
        ga_base.validate()?;
    }

    let jobs: Vec<(usize, usize)> = (0..config.rounds)
        .flat_map(|r| (0..config.folds).map(move |f| (r, f)))
        .collect();
    let results: Vec<FoldReport> = jobs
        .par_iter()
        .map(|&(round, fold)| {
            run_fold(
                &x,
                &targets,
                &plans[round],
                fold,
                method,
                config,
                &ga_base,
                observer,
            )
            .map_err(|e| Error::Fold {
                round,
                fold,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let mut rounds = Vec::with_capacity(config.rounds);
    for (round, folds) in results.chunks(config.folds).enumerate() {
        let mean = folds.iter().map(|f| f.value).sum::<f64>() / folds.len() as f64;
        rounds.push(RoundReport {
            round,
            folds: folds.to_vec(),
            mean,
        });
    }
    let means: Vec<f64> = rounds.iter().map(|r| r.mean).collect();
    let mean = means.iter().sum::<f64>() / means.len() as f64;
    let std = if means.len() > 1 {
        (means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (means.len() - 1) as f64).sqrt()
    } else {
        0.0
    };
    let mean_selected_features = (method == Method::Ga).then(|| {
        results
            .iter()
            .filter_map(|f| f.selected_features)
            .map(|c| c as f64)
            .sum::<f64>()
            / results.len() as f64
    });

    Ok(EvalReport {
        dataset: dataset.manifest.dataset_name.clone(),
        blocks: dataset
            .block_names()
            .into_iter()
            .filter(|n| blocks.contains(n))
            .collect(),
        n_features: x.dim(),
        method,
        task,
        metric: Metric::for_task(task),
        seed: config.seed,
        rounds,
        mean,
        std,
        mean_selected_features,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_fold(
    x: &FeatureBlock,
    targets: &TaskTargets,
    plan: &FoldPlan,
    fold: usize,
    method: Method,
    config: &ProtocolConfig,
    ga_base: &GaConfig,
    observer: &dyn FoldObserver,
) -> Result<FoldReport> {
    let round = plan.round as u64;
    let train = plan.train_indices(fold);
    let test = plan.test_indices(fold);
    let standardizer = Standardizer::fit(x, &train)?;
    let x_train = standardizer.apply(&x.select_rows(&train))?;
    let x_test = standardizer.apply(&x.select_rows(&test))?;
    let train_cfg = TrainConfig {
        seed: rng::derive_seed(config.seed, &[tag::TRAIN, round, fold as u64]),
        ..config.train.clone()
    };

    let pick = |v: &[Label], idx: &[usize]| idx.iter().map(|&i| v[i]).collect::<Vec<_>>();
    let pick_f = |v: &[f64], idx: &[usize]| idx.iter().map(|&i| v[i]).collect::<Vec<_>>();

    let seed_model = |x_train: &FeatureBlock| -> Result<LinearModel> {
        match targets {
            TaskTargets::Labels(l) => train_svm(x_train, &pick(l, &train), &train_cfg),
            TaskTargets::Scores(s) => train_svr(x_train, &pick_f(s, &train), &train_cfg),
        }
    };
    let linear = seed_model(&x_train)?;
    let (predictions, selected) = match method {
        Method::Svm | Method::Svr => (linear.decision_values(&x_test)?, None),
        Method::Ga => {
            let ga_cfg = GaConfig {
                seed: rng::derive_seed(config.seed, &[tag::GA, round, fold as u64]),
                ..ga_base.clone()
            };
            let (train_labels, train_scores);
            let ga_targets = match targets {
                TaskTargets::Labels(l) => {
                    train_labels = pick(l, &train);
                    Targets::Classification(&train_labels)
                }
                TaskTargets::Scores(s) => {
                    train_scores = pick_f(s, &train);
                    Targets::Regression(&train_scores)
                }
            };
            let out = evolve(&x_train, ga_targets, &linear, &ga_cfg)?;
            (
                out.best.predictions(&x_test)?,
                Some(out.best.selected_count()),
            )
        }
    };

    let value = match targets {
        TaskTargets::Labels(l) => {
            let predicted: Vec<Label> = predictions.iter().map(|&p| Label::from_score(p)).collect();
            gcr(&predicted, &pick(l, &test))?
        }
        TaskTargets::Scores(s) => lcc(&predictions, &pick_f(s, &test))?,
    };
    observer.on_fold(&FoldAudit {
        round: plan.round,
        fold,
        train: &train,
        test: &test,
        standardizer: &standardizer,
        predictions: &predictions,
    });
    Ok(FoldReport {
        fold,
        n_train: train.len(),
        n_test: test.len(),
        value,
        selected_features: selected,
    })
}

/// Runs `f` on a dedicated pool of `threads` workers (`None` uses the global
/// pool). Results do not depend on the thread count.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
