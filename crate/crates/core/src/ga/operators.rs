use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::chromosome::Chromosome;
use crate::error::{Error, Result};

/// Draws `tournament_size` indices uniformly with replacement and returns the
/// one with the lowest fitness; on ties the earliest draw wins. A tournament
/// at least as large as the population is exhaustive (lowest index wins
/// ties) and consumes no randomness.
pub fn select_tournament<R: Rng + ?Sized>(
    fitnesses: &[f64],
    tournament_size: usize,
    rng: &mut R,
) -> Result<usize> {
    if fitnesses.is_empty() {
        return Err(Error::Empty("select_tournament"));
    }
    if tournament_size >= fitnesses.len() {
        return Ok(argmin(fitnesses));
    }
    let mut best = rng.random_range(0..fitnesses.len());
    for _ in 1..tournament_size {
        let i = rng.random_range(0..fitnesses.len());
        if fitnesses[i].total_cmp(&fitnesses[best]).is_lt() {
            best = i;
        }
    }
    Ok(best)
}

/// Index of the lowest value, first one on ties.
pub(crate) fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if v.total_cmp(&values[best]).is_lt() {
            best = i;
        }
    }
    best
}

/// Deterministic core of [`crossover`]. Child 1 takes mask bit `j` from `a`
/// when `bit_from_a[j]` (child 2 gets the other parent's bit) and weights
/// `alpha * a + (1 - alpha) * b`; child 2 gets `(1 - alpha) * a + alpha * b`.
pub fn blend(
    a: &Chromosome,
    b: &Chromosome,
    alpha: f64,
    bit_from_a: &[bool],
) -> Result<(Chromosome, Chromosome)> {
    let n = a.n_features();
    if b.n_features() != n || bit_from_a.len() != n {
        return Err(Error::LengthMismatch {
            context: "crossover",
            left: n,
            right: if b.n_features() != n {
                b.n_features()
            } else {
                bit_from_a.len()
            },
        });
    }
    // x + alpha * (y - x) keeps identical parents fixed exactly.
    let mix = |x: f64, y: f64, t: f64| x + t * (y - x);
    let mut c1 = Chromosome {
        mask: Vec::with_capacity(n),
        weights: Vec::with_capacity(n),
        bias: mix(b.bias, a.bias, alpha),
    };
    let mut c2 = Chromosome {
        mask: Vec::with_capacity(n),
        weights: Vec::with_capacity(n),
        bias: mix(a.bias, b.bias, alpha),
    };
    for (j, &from_a) in bit_from_a.iter().enumerate() {
        let (m1, m2) = if from_a {
            (a.mask[j], b.mask[j])
        } else {
            (b.mask[j], a.mask[j])
        };
        c1.mask.push(m1);
        c2.mask.push(m2);
        c1.weights.push(mix(b.weights[j], a.weights[j], alpha));
        c2.weights.push(mix(a.weights[j], b.weights[j], alpha));
    }
    Ok((c1, c2))
}

/// With probability `crossover_prob`: uniform crossover on the masks and a
/// single-alpha arithmetic blend on weights and bias. Otherwise the parents
/// are returned unchanged.
pub fn crossover<R: Rng + ?Sized>(
    a: &Chromosome,
    b: &Chromosome,
    crossover_prob: f64,
    rng: &mut R,
) -> Result<(Chromosome, Chromosome)> {
    if a.n_features() != b.n_features() {
        return Err(Error::LengthMismatch {
            context: "crossover",
            left: a.n_features(),
            right: b.n_features(),
        });
    }
    if rng.random::<f64>() >= crossover_prob {
        return Ok((a.clone(), b.clone()));
    }
    let alpha: f64 = rng.random();
    let bits: Vec<bool> = (0..a.n_features()).map(|_| rng.random()).collect();
    blend(a, b, alpha, &bits)
}

/// Flips each mask bit with probability `bit_prob` and adds
/// `N(0, sigma)` noise to every weight and the bias.
pub fn mutate<R: Rng + ?Sized>(
    c: &Chromosome,
    bit_prob: f64,
    sigma: f64,
    rng: &mut R,
) -> Chromosome {
    let mut out = c.clone();
    for bit in &mut out.mask {
        if rng.random::<f64>() < bit_prob {
            *bit = !*bit;
        }
    }
    if sigma > 0.0 {
        let noise = Normal::new(0.0, sigma).expect("sigma is finite and positive");
        for w in &mut out.weights {
            *w += noise.sample(rng);
        }
        out.bias += noise.sample(rng);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn chrom(mask: &[bool], weights: &[f64], bias: f64) -> Chromosome {
        Chromosome::new(mask.to_vec(), weights.to_vec(), bias).unwrap()
    }

    #[test]
    fn tournament_edge_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let fit = [0.5, 0.1, 0.9, 0.3];
        for size in [4, 10] {
            assert_eq!(select_tournament(&fit, size, &mut rng).unwrap(), 1);
        }
        assert_eq!(select_tournament(&[2.0, 1.0, 1.0], 3, &mut rng).unwrap(), 1);
        assert_eq!(select_tournament(&[3.0], 3, &mut rng).unwrap(), 0);
        assert!(select_tournament(&[], 3, &mut rng).is_err());
    }

    #[test]
    fn tournament_ties_go_to_first_draw() {
        let fit = [1.0, 0.0, 0.0, 1.0];
        let mut seen = [0usize; 4];
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..4000 {
            seen[select_tournament(&fit, 3, &mut rng).unwrap()] += 1;
        }
        // Indices 1 and 2 are interchangeable; 0 and 3 win only when no
        // better index is drawn.
        assert!(seen[0] + seen[3] < 4000 / 4);
        assert!(
            (seen[1] as f64 / seen[2] as f64 - 1.0).abs() < 0.15,
            "{seen:?}"
        );
    }

    #[test]
    fn blend_arithmetic() {
        let a = chrom(&[true], &[0.0], 0.0);
        let b = chrom(&[false], &[2.0], 4.0);
        let (c1, c2) = blend(&a, &b, 0.25, &[true]).unwrap();
        assert_eq!(c1.weights, [1.5]);
        assert_eq!(c2.weights, [0.5]);
        assert_eq!((c1.bias, c2.bias), (3.0, 1.0));
        assert_eq!((c1.mask[0], c2.mask[0]), (true, false));
    }

    #[test]
    fn identical_parents_are_a_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = chrom(&[true, false, true], &[0.1, -7.3, 1e-3], 0.37);
        for _ in 0..50 {
            let (c1, c2) = crossover(&a, &a, 1.0, &mut rng).unwrap();
            assert_eq!(c1, a);
            assert_eq!(c2, a);
        }
    }

    #[test]
    fn zero_crossover_prob_returns_parents() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = chrom(&[true, false], &[1.0, 2.0], 0.0);
        let b = chrom(&[false, true], &[3.0, 4.0], 1.0);
        let (c1, c2) = crossover(&a, &b, 0.0, &mut rng).unwrap();
        assert_eq!((c1, c2), (a.clone(), b));
        assert!(crossover(&a, &chrom(&[true], &[1.0], 0.0), 1.0, &mut rng).is_err());
    }

    #[test]
    fn mutation_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = chrom(&[true, false, true], &[0.5, 1.5, -2.0], 0.1);
        assert_eq!(mutate(&a, 0.0, 0.0, &mut rng), a);
        let flipped = mutate(&a, 1.0, 0.0, &mut rng);
        assert_eq!(flipped.mask, [false, true, false]);
        assert_eq!(flipped.weights, a.weights);
        let noisy = mutate(&a, 0.0, 0.1, &mut rng);
        assert_eq!(noisy.mask, a.mask);
        assert_ne!(noisy.weights, a.weights);
        assert!(noisy.weights.iter().all(|w| w.is_finite()));
    }
}
