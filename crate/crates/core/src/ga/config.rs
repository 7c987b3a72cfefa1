use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear::Task;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    pub elitism_fraction: f64,
    pub tournament_size: usize,
    /// Per-bit flip probability; `None` means `1 / n_features`.
    pub bit_mutation_prob: Option<f64>,
    /// Std of the Gaussian weight/bias noise; `None` means
    /// `max(0.01 * std(seed weights), 1e-3)`.
    pub weight_mutation_sigma: Option<f64>,
    /// Initial perturbation, as a multiple of the seed weights' std.
    pub init_perturb_sigma: f64,
    /// Probability that a bit is set in a perturbed initial individual.
    pub init_mask_density: f64,
    pub seed: u64,
    pub task: Task,
}

impl GaConfig {
    /// Population 100, 200 generations, crossover 0.80, elitism 7%.
    pub fn classification() -> Self {
        GaConfig {
            population_size: 100,
            generations: 200,
            crossover_prob: 0.80,
            elitism_fraction: 0.07,
            tournament_size: 3,
            bit_mutation_prob: None,
            weight_mutation_sigma: None,
            init_perturb_sigma: 0.05,
            init_mask_density: 0.8,
            seed: 0,
            task: Task::Classification,
        }
    }

    /// Population 100, 250 generations, crossover 0.85, elitism 10%.
    pub fn regression() -> Self {
        GaConfig {
            generations: 250,
            crossover_prob: 0.85,
            elitism_fraction: 0.10,
            task: Task::Regression,
            ..Self::classification()
        }
    }

    pub fn for_task(task: Task) -> Self {
        match task {
            Task::Classification => Self::classification(),
            Task::Regression => Self::regression(),
        }
    }

    /// `round_half_up(elitism_fraction * population_size)`, at least 1.
    pub fn elite_count(&self) -> usize {
        let e = (self.elitism_fraction * self.population_size as f64 + 0.5).floor() as usize;
        e.clamp(1, self.population_size)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let unit = |p: f64| (0.0..=1.0).contains(&p);
        if self.population_size == 0 {
            return bad("population_size must be positive".into());
        }
        if self.generations == 0 {
            return bad("generations must be positive".into());
        }
        if !unit(self.crossover_prob) {
            return bad(format!(
                "crossover_prob {} not in [0, 1]",
                self.crossover_prob
            ));
        }
        if !(0.0..1.0).contains(&self.elitism_fraction) {
            return bad(format!(
                "elitism_fraction {} not in [0, 1)",
                self.elitism_fraction
            ));
        }
        if self.tournament_size == 0 {
            return bad("tournament_size must be positive".into());
        }
        if let Some(p) = self.bit_mutation_prob {
            if !unit(p) {
                return bad(format!("bit_mutation_prob {p} not in [0, 1]"));
            }
        }
        if let Some(s) = self.weight_mutation_sigma {
            if !(s >= 0.0 && s.is_finite()) {
                return bad(format!("weight_mutation_sigma {s} must be non-negative"));
            }
        }
        if !(self.init_perturb_sigma >= 0.0 && self.init_perturb_sigma.is_finite()) {
            return bad("init_perturb_sigma must be non-negative".into());
        }
        if !(self.init_mask_density > 0.0 && self.init_mask_density <= 1.0) {
            return bad(format!(
                "init_mask_density {} not in (0, 1]",
                self.init_mask_density
            ));
        }
        Ok(())
    }
}
