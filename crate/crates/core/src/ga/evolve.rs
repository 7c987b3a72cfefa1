use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chromosome::{fitness, Chromosome, Targets};
use super::config::GaConfig;
use super::operators::{argmin, crossover, mutate, select_tournament};
use crate::error::{Error, Result};
use crate::linear::LinearModel;
use crate::rng::{self, tag};
use crate::store::FeatureBlock;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub best_selected_count: usize,
}

/// Per-generation statistics; row 0 is the initial population.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GaTrace {
    pub rows: Vec<TraceRow>,
}

impl GaTrace {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "generation",
            "best_fitness",
            "mean_fitness",
            "best_selected_count",
        ])
        .expect("in-memory write");
        for r in &self.rows {
            w.serialize((
                r.generation,
                r.best_fitness,
                r.mean_fitness,
                r.best_selected_count,
            ))
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is UTF-8")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaOutcome {
    pub best: Chromosome,
    pub best_fitness: f64,
    pub trace: GaTrace,
}

fn population_std(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// Individual 0 is the seed model with every feature selected. The others
/// get Gaussian noise of std `init_perturb_sigma * std(seed weights)` on each
/// weight and the bias, and a fresh mask with bits set at
/// `init_mask_density`.
pub fn init_population(seed_model: &LinearModel, config: &GaConfig) -> Result<Vec<Chromosome>> {
    config.validate()?;
    let sigma = config.init_perturb_sigma * population_std(&seed_model.weights);
    let noise =
        Normal::new(0.0, sigma).map_err(|e| Error::Config(format!("initial perturbation: {e}")))?;
    let seed = Chromosome::from_model(seed_model);
    let mut pop = Vec::with_capacity(config.population_size);
    pop.push(seed.clone());
    for i in 1..config.population_size {
        let mut rng = rng::stream(config.seed, &[tag::GA_INIT, i as u64]);
        let mut c = seed.clone();
        for (m, w) in c.mask.iter_mut().zip(&mut c.weights) {
            *m = rng.random::<f64>() < config.init_mask_density;
            *w += noise.sample(&mut rng);
        }
        c.bias += noise.sample(&mut rng);
        pop.push(c);
    }
    Ok(pop)
}

fn evaluate(pop: &[Chromosome], x: &FeatureBlock, targets: Targets) -> Result<Vec<f64>> {
    pop.par_iter().map(|c| fitness(c, x, targets)).collect()
}

fn trace_row(generation: usize, pop: &[Chromosome], fit: &[f64]) -> TraceRow {
    let best = argmin(fit);
    TraceRow {
        generation,
        best_fitness: fit[best],
        mean_fitness: fit.iter().sum::<f64>() / fit.len() as f64,
        best_selected_count: pop[best].selected_count(),
    }
}

/// Runs the GA seeded from `seed_model`.
///
/// Each generation keeps the `elite_count()` best individuals unchanged and
/// fills the rest with children bred pairwise by tournament selection,
/// crossover and mutation. Pair `k` of generation `g` draws from its own
/// random stream, and elites are ranked by (fitness, index), so the result
/// does not depend on the number of worker threads.
pub fn evolve(
    features: &FeatureBlock,
    targets: Targets,
    seed_model: &LinearModel,
    config: &GaConfig,
) -> Result<GaOutcome> {
    config.validate()?;
    let n_features = features.dim();
    if seed_model.dim() != n_features {
        return Err(Error::LengthMismatch {
            context: "evolve seed model",
            left: n_features,
            right: seed_model.dim(),
        });
    }
    if features.n_rows() != targets.len() {
        return Err(Error::LengthMismatch {
            context: "evolve targets",
            left: features.n_rows(),
            right: targets.len(),
        });
    }
    if targets.task() != config.task {
        return Err(Error::Config(format!(
            "GA configured for {} but given {} targets",
            config.task,
            targets.task()
        )));
    }
    let bit_prob = config.bit_mutation_prob.unwrap_or(1.0 / n_features as f64);
    let sigma = config
        .weight_mutation_sigma
        .unwrap_or_else(|| (0.01 * population_std(&seed_model.weights)).max(1e-3));

    let mut pop = init_population(seed_model, config)?;
    let mut fit = evaluate(&pop, features, targets)?;
    let mut trace = GaTrace {
        rows: vec![trace_row(0, &pop, &fit)],
    };
    let first = argmin(&fit);
    let mut best = (pop[first].clone(), fit[first]);

    let n_elite = config.elite_count();
    let n_children = config.population_size - n_elite;
    for generation in 1..=config.generations {
        let mut order: Vec<usize> = (0..pop.len()).collect();
        order.sort_by(|&a, &b| fit[a].total_cmp(&fit[b]).then(a.cmp(&b)));

        let children: Vec<Chromosome> = (0..n_children.div_ceil(2))
            .into_par_iter()
            .map(|pair| -> Result<[Chromosome; 2]> {
                let mut rng = rng::stream(
                    config.seed,
                    &[tag::GA_BREED, generation as u64, pair as u64],
                );
                let p1 = select_tournament(&fit, config.tournament_size, &mut rng)?;
                let p2 = select_tournament(&fit, config.tournament_size, &mut rng)?;
                let (c1, c2) = crossover(&pop[p1], &pop[p2], config.crossover_prob, &mut rng)?;
                Ok([
                    mutate(&c1, bit_prob, sigma, &mut rng),
                    mutate(&c2, bit_prob, sigma, &mut rng),
                ])
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .take(n_children)
            .collect();
        let child_fit = evaluate(&children, features, targets)?;

        let mut next = Vec::with_capacity(config.population_size);
        let mut next_fit = Vec::with_capacity(config.population_size);
        for &i in &order[..n_elite] {
            next.push(pop[i].clone());
            next_fit.push(fit[i]);
        }
        next.extend(children);
        next_fit.extend(child_fit);
        pop = next;
        fit = next_fit;

        let row = trace_row(generation, &pop, &fit);
        let i = argmin(&fit);
        if fit[i] < best.1 {
            best = (pop[i].clone(), fit[i]);
        }
        trace.rows.push(row);
    }
    Ok(GaOutcome {
        best: best.0,
        best_fitness: best.1,
        trace,
    })
}
