//! Run configuration: defaults, then the `--config` file, then flags.

use std::fs;
use std::path::Path;

use faceaes::eval::{Method, ProtocolConfig};
use faceaes::ga::GaConfig;
use faceaes::linear::{Task, TrainConfig};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::Overrides;

/// Everything a run depends on. Written to `resolved_config.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: Task,
    pub method: Option<Method>,
    pub blocks: Option<Vec<String>>,
    pub seed: u64,
    pub rounds: usize,
    pub folds: usize,
    pub stratified: bool,
    pub train: TrainConfig,
    pub ga: GaConfig,
}

impl RunConfig {
    fn defaults(task: Task) -> Self {
        let p = ProtocolConfig::default();
        RunConfig {
            task,
            method: None,
            blocks: None,
            seed: p.seed,
            rounds: p.rounds,
            folds: p.folds,
            stratified: p.stratified,
            train: p.train,
            ga: GaConfig::for_task(task),
        }
    }

    pub fn protocol(&self) -> ProtocolConfig {
        ProtocolConfig {
            rounds: self.rounds,
            folds: self.folds,
            seed: self.seed,
            stratified: self.stratified,
            train: self.train.clone(),
            ga: Some(self.ga.clone()),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config is serializable");
        s.push('\n');
        s
    }
}

fn read_file(path: &Path) -> Result<Value, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let is_toml = path.extension().is_some_and(|e| e == "toml");
    let value = if is_toml {
        toml::from_str::<Value>(&text).map_err(|e| e.to_string())
    } else {
        serde_json::from_str::<Value>(&text).map_err(|e| e.to_string())
    };
    value.map_err(|e| format!("config {}: {e}", path.display()))
}

fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Resolves the configuration. The task is settled first because it picks
/// the GA defaults that the file and flags then override.
pub fn resolve(
    file: Option<&Path>,
    flags: &Overrides,
    task_flag: Option<Task>,
) -> Result<RunConfig, String> {
    let file_value = file.map(read_file).transpose()?;
    let file_task = match file_value.as_ref().and_then(|v| v.get("task")) {
        Some(t) => Some(
            serde_json::from_value::<Task>(t.clone()).map_err(|e| format!("config task: {e}"))?,
        ),
        None => None,
    };
    let task = task_flag.or(file_task).unwrap_or(Task::Classification);

    let mut merged =
        serde_json::to_value(RunConfig::defaults(task)).expect("config is serializable");
    if let Some(v) = file_value {
        merge(&mut merged, v);
    }
    let mut cfg: RunConfig = serde_json::from_value(merged).map_err(|e| format!("config: {e}"))?;
    cfg.task = task;
    cfg.ga.task = task;
    flags.apply(&mut cfg);
    cfg.train.validate().map_err(|e| e.to_string())?;
    cfg.ga.validate().map_err(|e| e.to_string())?;
    if cfg.rounds == 0 || cfg.folds < 2 {
        return Err(format!(
            "need rounds >= 1 and folds >= 2, got {} and {}",
            cfg.rounds, cfg.folds
        ));
    }
    Ok(cfg)
}
