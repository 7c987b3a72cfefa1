use faceaes::eval::with_threads;
use faceaes::ga::{
    crossover, evolve, fitness, mutate, select_tournament, Chromosome, GaConfig, Targets,
};
use faceaes::linear::{train_svm, LinearModel, Task, TrainConfig};
use faceaes::store::{Label, Standardizer};
use faceaes::synth::{generate, SynthParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_chromosome(rng: &mut ChaCha8Rng, n: usize) -> Chromosome {
    Chromosome::new(
        (0..n).map(|_| rng.random()).collect(),
        (0..n).map(|_| rng.random_range(-2.0..2.0)).collect(),
        rng.random_range(-1.0..1.0),
    )
    .unwrap()
}

#[test]
fn masked_prediction_equals_dense_prediction() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..500 {
        let n = if case % 50 == 0 {
            10240
        } else {
            rng.random_range(1..600)
        };
        let c = random_chromosome(&mut rng, n);
        let row: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let dense = LinearModel::new(c.effective_weights(), c.bias, Task::Regression).unwrap();
        let (a, b) = (c.predict(&row).unwrap(), dense.predict(&row).unwrap());
        assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0));
    }
    let all_on =
        Chromosome::from_model(&LinearModel::new(vec![0.5, -1.5], 2.0, Task::Regression).unwrap());
    assert_eq!(all_on.predict(&[2.0, 2.0]).unwrap(), 0.0);
}

#[test]
fn tournament_with_uniform_fitness_selects_uniformly() {
    let n = 10;
    let draws = 100_000;
    let fit = vec![0.25; n];
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut counts = vec![0usize; n];
    for _ in 0..draws {
        counts[select_tournament(&fit, 3, &mut rng).unwrap()] += 1;
    }
    let expected = draws as f64 / n as f64;
    let sigma = (draws as f64 * (1.0 / n as f64) * (1.0 - 1.0 / n as f64)).sqrt();
    for &c in &counts {
        assert!((c as f64 - expected).abs() <= 3.0 * sigma, "{counts:?}");
    }
    // Pearson chi-square with 9 degrees of freedom, 0.999 quantile = 27.88.
    let chi2: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    assert!(chi2 < 27.88, "chi2 = {chi2}");
}

#[test]
fn mutation_flip_rate_is_binomial() {
    let (n, p, trials) = (100usize, 0.05, 10_000usize);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let c = random_chromosome(&mut rng, n);
    let mut flips = 0usize;
    for _ in 0..trials {
        let m = mutate(&c, p, 0.0, &mut rng);
        flips += m.mask.iter().zip(&c.mask).filter(|(a, b)| a != b).count();
    }
    let total = (n * trials) as f64;
    let sigma = (total * p * (1.0 - p)).sqrt();
    assert!((flips as f64 - total * p).abs() <= 3.0 * sigma, "{flips}");
}

proptest! {
    #[test]
    fn operators_preserve_shape_and_finiteness(
        n in 1usize..64,
        seed in any::<u64>(),
        pc in 0.0f64..=1.0,
        pm in 0.0f64..=1.0,
        sigma in 0.0f64..10.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_chromosome(&mut rng, n);
        let b = random_chromosome(&mut rng, n);
        let (c1, c2) = crossover(&a, &b, pc, &mut rng).unwrap();
        for c in [mutate(&c1, pm, sigma, &mut rng), mutate(&c2, pm, sigma, &mut rng)] {
            prop_assert_eq!(c.mask.len(), n);
            prop_assert_eq!(c.weights.len(), n);
            prop_assert!(c.bias.is_finite() && c.weights.iter().all(|w| w.is_finite()));
        }
    }
}

fn problem() -> (faceaes::store::FeatureBlock, Vec<Label>, LinearModel) {
    let d = generate(&SynthParams {
        n: 150,
        blocks: vec![("P".into(), 40)],
        informative: 8,
        noise: 0.2,
        seed: 5,
        ..SynthParams::default()
    })
    .unwrap();
    let all: Vec<usize> = (0..150).collect();
    let x = Standardizer::fit(&d.blocks[0], &all)
        .unwrap()
        .apply(&d.blocks[0])
        .unwrap();
    let y = d.manifest.native_labels().unwrap();
    let seed = train_svm(&x, &y, &TrainConfig::default()).unwrap();
    (x, y, seed)
}

#[test]
fn evolve_is_independent_of_thread_count() {
    let (x, y, seed) = problem();
    let cfg = GaConfig {
        population_size: 30,
        generations: 25,
        seed: 99,
        ..GaConfig::classification()
    };
    let run = |threads| {
        with_threads(Some(threads), || {
            evolve(&x, Targets::Classification(&y), &seed, &cfg).unwrap()
        })
        .unwrap()
    };
    let one = run(1);
    let many = run(4);
    assert_eq!(one.best.mask, many.best.mask);
    let bits = |c: &Chromosome| c.weights.iter().map(|w| w.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&one.best), bits(&many.best));
    assert_eq!(one.trace, many.trace);
    assert_eq!(one.best_fitness.to_bits(), many.best_fitness.to_bits());
    assert_eq!(
        fitness(&one.best, &x, Targets::Classification(&y)).unwrap(),
        one.best_fitness
    );
}

#[test]
fn regression_run_improves_on_its_seed() {
    let (x, _, _) = problem();
    let d = generate(&SynthParams {
        n: 150,
        blocks: vec![("P".into(), 40)],
        informative: 8,
        noise: 0.2,
        seed: 5,
        ..SynthParams::default()
    })
    .unwrap();
    let scores = d.manifest.scores();
    let seed = faceaes::linear::train_svr(&x, &scores, &TrainConfig::default()).unwrap();
    let cfg = GaConfig {
        population_size: 40,
        generations: 30,
        seed: 2,
        ..GaConfig::regression()
    };
    let out = evolve(&x, Targets::Regression(&scores), &seed, &cfg).unwrap();
    let seed_fit = fitness(
        &Chromosome::from_model(&seed),
        &x,
        Targets::Regression(&scores),
    )
    .unwrap();
    assert_eq!(
        out.trace.rows[0].best_fitness.min(seed_fit),
        out.trace.rows[0].best_fitness
    );
    assert!(out.best_fitness <= seed_fit);
    assert!(out
        .trace
        .rows
        .windows(2)
        .all(|w| w[1].best_fitness <= w[0].best_fitness));
}
