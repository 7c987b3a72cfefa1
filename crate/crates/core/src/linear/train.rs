//! Primal averaged SGD for the linear SVM (hinge) and SVR
//! (epsilon-insensitive).
//!
//! Objective: `lambda/2 * |w|^2 + mean(loss)` with `lambda = 1 / (C * n)`;
//! the bias is not regularized. Step size `eta_t = eta0 / (1 + lambda * eta0 * t)`
//! where `t` counts updates. Sample order is a fresh seeded permutation each
//! epoch, so training is deterministic given the seed.
//!
//! Iterates are averaged from the second epoch on. After each epoch the
//! full-data objective of the averaged iterate is computed; the returned model
//! is the epoch candidate with the lowest objective, so the accepted
//! objective sequence never increases.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::dot;
use super::loss::hinge;
use super::model::{LinearModel, Task};
use crate::error::{Error, Result};
use crate::rng::{self, tag};
use crate::store::{FeatureBlock, Label};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    /// Regularization trade-off; larger means weaker regularization.
    pub c: f64,
    pub epochs: usize,
    /// Initial step size. `None` picks `1 / (mean |x|^2 + 1)`.
    pub eta0: Option<f64>,
    pub svr_epsilon: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            c: 1.0,
            epochs: 50,
            eta0: None,
            svr_epsilon: 0.1,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::Config(format!("C must be positive, got {}", self.c)));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be positive".into()));
        }
        if let Some(eta) = self.eta0 {
            if !(eta > 0.0 && eta.is_finite()) {
                return Err(Error::Config(format!("eta0 must be positive, got {eta}")));
            }
        }
        if !(self.svr_epsilon >= 0.0 && self.svr_epsilon.is_finite()) {
            return Err(Error::Config("svr_epsilon must be non-negative".into()));
        }
        Ok(())
    }
}

/// Full-data objective after every epoch.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolverTrace {
    /// Objective of that epoch's averaged iterate.
    pub candidate: Vec<f64>,
    /// Objective of the model kept so far (running minimum of `candidate`).
    pub accepted: Vec<f64>,
}

enum Targets<'a> {
    Labels(&'a [Label]),
    Scores { values: &'a [f64], epsilon: f64 },
}

impl Targets<'_> {
    /// Subgradient of the per-sample loss with respect to the prediction.
    #[inline]
    fn dloss(&self, i: usize, pred: f64) -> f64 {
        match self {
            Targets::Labels(y) => {
                let s = y[i].sign();
                if s * pred < 1.0 {
                    -s
                } else {
                    0.0
                }
            }
            Targets::Scores { values, epsilon } => {
                let r = pred - values[i];
                if r > *epsilon {
                    1.0
                } else if r < -*epsilon {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }

    #[inline]
    fn loss(&self, i: usize, pred: f64) -> f64 {
        match self {
            Targets::Labels(y) => hinge(pred, y[i]),
            Targets::Scores { values, epsilon } => ((pred - values[i]).abs() - epsilon).max(0.0),
        }
    }
}

fn objective(x: &FeatureBlock, t: &Targets, w: &[f64], b: f64, lambda: f64) -> f64 {
    let data: f64 = x
        .rows()
        .enumerate()
        .map(|(i, r)| t.loss(i, dot(w, r) + b))
        .sum();
    0.5 * lambda * w.iter().map(|v| v * v).sum::<f64>() + data / x.n_rows() as f64
}

fn sgd(
    x: &FeatureBlock,
    targets: Targets,
    bias_init: f64,
    cfg: &TrainConfig,
    task: Task,
) -> Result<(LinearModel, SolverTrace)> {
    cfg.validate()?;
    let n = x.n_rows();
    let dim = x.dim();
    let lambda = 1.0 / (cfg.c * n as f64);
    let eta0 = cfg.eta0.unwrap_or_else(|| {
        let mean_sq = x
            .rows()
            .map(|r| r.iter().map(|&v| f64::from(v) * f64::from(v)).sum::<f64>())
            .sum::<f64>()
            / n as f64;
        1.0 / (mean_sq + 1.0)
    });

    let mut w = vec![0.0; dim];
    let mut b = bias_init;
    let mut avg_w = w.clone();
    let mut avg_b = b;
    let mut n_avg = 0usize;
    let average_from = usize::from(cfg.epochs > 1);

    let mut best = (w.clone(), b);
    let mut best_obj = objective(x, &targets, &w, b, lambda);
    let mut trace = SolverTrace::default();
    let mut order: Vec<usize> = (0..n).collect();
    let mut t = 0usize;

    for epoch in 0..cfg.epochs {
        order.sort_unstable();
        order.shuffle(&mut rng::stream(cfg.seed, &[tag::TRAIN, epoch as u64]));
        for &i in &order {
            let eta = eta0 / (1.0 + lambda * eta0 * t as f64);
            let row = x.row(i);
            let g = targets.dloss(i, dot(&w, row) + b);
            let shrink = 1.0 - eta * lambda;
            if g != 0.0 {
                for (wj, &xj) in w.iter_mut().zip(row) {
                    *wj = *wj * shrink - eta * g * f64::from(xj);
                }
                b -= eta * g;
            } else {
                w.iter_mut().for_each(|wj| *wj *= shrink);
            }
            t += 1;
            if epoch >= average_from {
                n_avg += 1;
                let k = 1.0 / n_avg as f64;
                for (a, &wj) in avg_w.iter_mut().zip(&w) {
                    *a += (wj - *a) * k;
                }
                avg_b += (b - avg_b) * k;
            }
        }
        let (cw, cb) = if n_avg > 0 { (&avg_w, avg_b) } else { (&w, b) };
        let obj = objective(x, &targets, cw, cb, lambda);
        trace.candidate.push(obj);
        if obj <= best_obj {
            best_obj = obj;
            best = (cw.clone(), cb);
        }
        trace.accepted.push(best_obj);
    }
    let model = LinearModel::new(best.0, best.1, task)?;
    Ok((model, trace))
}

pub fn train_svm(
    features: &FeatureBlock,
    labels: &[Label],
    cfg: &TrainConfig,
) -> Result<LinearModel> {
    train_svm_traced(features, labels, cfg).map(|(m, _)| m)
}

pub fn train_svm_traced(
    features: &FeatureBlock,
    labels: &[Label],
    cfg: &TrainConfig,
) -> Result<(LinearModel, SolverTrace)> {
    check_rows("train_svm", features, labels.len())?;
    let first = labels[0];
    if labels.iter().all(|&l| l == first) {
        return Err(Error::SingleClass);
    }
    sgd(
        features,
        Targets::Labels(labels),
        0.0,
        cfg,
        Task::Classification,
    )
}

pub fn train_svr(
    features: &FeatureBlock,
    scores: &[f64],
    cfg: &TrainConfig,
) -> Result<LinearModel> {
    train_svr_traced(features, scores, cfg).map(|(m, _)| m)
}

/// The bias starts at the mean score, so a constant target is fit exactly.
pub fn train_svr_traced(
    features: &FeatureBlock,
    scores: &[f64],
    cfg: &TrainConfig,
) -> Result<(LinearModel, SolverTrace)> {
    check_rows("train_svr", features, scores.len())?;
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::Config("scores must be finite".into()));
    }
    let mean = scores.iter().sum::<f64>() / scores.len() as f64;
    sgd(
        features,
        Targets::Scores {
            values: scores,
            epsilon: cfg.svr_epsilon,
        },
        mean,
        cfg,
        Task::Regression,
    )
}

fn check_rows(context: &'static str, x: &FeatureBlock, n_targets: usize) -> Result<()> {
    if x.n_rows() != n_targets {
        return Err(Error::LengthMismatch {
            context,
            left: x.n_rows(),
            right: n_targets,
        });
    }
    if n_targets < 2 {
        return Err(Error::Config(format!(
            "{context} needs at least 2 samples, got {n_targets}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{High, Low};

    #[test]
    fn separable_pair() {
        let x = FeatureBlock::from_rows("X", &[vec![-1.0], vec![1.0]]).unwrap();
        let m = train_svm(&x, &[Low, High], &TrainConfig::default()).unwrap();
        assert!(m.weights[0] > 0.0);
        let preds = m.decision_values(&x).unwrap();
        assert_eq!(Label::from_score(preds[0]), Low);
        assert_eq!(Label::from_score(preds[1]), High);
    }

    #[test]
    fn precondition_errors() {
        let x = FeatureBlock::from_rows("X", &[vec![-1.0], vec![1.0]]).unwrap();
        let cfg = TrainConfig::default();
        assert!(matches!(
            train_svm(&x, &[High, High], &cfg),
            Err(Error::SingleClass)
        ));
        assert!(matches!(
            train_svm(&x, &[High], &cfg),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            train_svr(&x, &[1.0, 2.0, 3.0], &cfg),
            Err(Error::LengthMismatch { .. })
        ));
        let bad = TrainConfig {
            c: 0.0,
            ..TrainConfig::default()
        };
        assert!(matches!(
            train_svr(&x, &[1.0, 2.0], &bad),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn constant_scores_give_flat_model() {
        let rows: Vec<Vec<f32>> = (0..20)
            .map(|i| vec![i as f32 / 10.0 - 1.0, (i % 3) as f32])
            .collect();
        let x = FeatureBlock::from_rows("X", &rows).unwrap();
        let m = train_svr(&x, &[4.5; 20], &TrainConfig::default()).unwrap();
        assert!(m.weights.iter().all(|w| w.abs() < 1e-9), "{:?}", m.weights);
        assert!((m.bias - 4.5).abs() < 1e-9);
    }

    #[test]
    fn deterministic_given_seed() {
        let rows: Vec<Vec<f32>> = (0..40)
            .map(|i| vec![(i as f32 * 0.37).sin(), (i as f32 * 0.11).cos()])
            .collect();
        let labels: Vec<Label> = rows
            .iter()
            .map(|r| Label::from_score(f64::from(r[0] - r[1])))
            .collect();
        let x = FeatureBlock::from_rows("X", &rows).unwrap();
        let cfg = TrainConfig {
            seed: 9,
            ..TrainConfig::default()
        };
        let a = train_svm_traced(&x, &labels, &cfg).unwrap();
        let b = train_svm_traced(&x, &labels, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.1.accepted.windows(2).all(|w| w[1] <= w[0]));
    }
}
