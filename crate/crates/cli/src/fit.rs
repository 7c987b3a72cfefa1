//! The model written by `evaluate`: the chosen method fitted on every sample.

use std::path::Path;

use faceaes::eval::{Dataset, Method};
use faceaes::ga::{evolve, Targets};
use faceaes::linear::{train_svm, train_svr, ModelFile, Task};
use faceaes::store::Standardizer;

use crate::config::RunConfig;

pub fn final_model(
    dataset: &Dataset,
    blocks: &[String],
    method: Method,
    cfg: &RunConfig,
    out: &Path,
) -> Result<(), String> {
    let err = |e: faceaes::Error| e.to_string();
    let x = dataset.features(blocks).map_err(err)?;
    let all: Vec<usize> = (0..x.n_rows()).collect();
    let standardizer = Standardizer::fit(&x, &all).map_err(err)?;
    let x = standardizer.apply(&x).map_err(err)?;
    let train = faceaes::linear::TrainConfig {
        seed: cfg.seed,
        ..cfg.train.clone()
    };
    let config = serde_json::to_value(cfg).map_err(|e| e.to_string())?;
    let (labels, scores);
    let (linear, targets) = match cfg.task {
        Task::Classification => {
            labels = dataset.manifest.class_labels().map_err(err)?;
            (
                train_svm(&x, &labels, &train).map_err(err)?,
                Targets::Classification(&labels),
            )
        }
        Task::Regression => {
            scores = dataset.manifest.scores();
            (
                train_svr(&x, &scores, &train).map_err(err)?,
                Targets::Regression(&scores),
            )
        }
    };
    let file = if method == Method::Ga {
        let ga = faceaes::ga::GaConfig {
            seed: cfg.seed,
            ..cfg.ga.clone()
        };
        let outcome = evolve(&x, targets, &linear, &ga).map_err(err)?;
        let trace = out.join("ga_trace.csv");
        std::fs::write(&trace, outcome.trace.to_csv())
            .map_err(|e| format!("cannot write {}: {e}", trace.display()))?;
        outcome
            .best
            .to_model_file(cfg.task, Some(standardizer), config)
    } else {
        ModelFile {
            model: linear,
            standardizer: Some(standardizer),
            mask: None,
            config,
        }
    };
    file.write(out.join("model.flmd")).map_err(err)
}
