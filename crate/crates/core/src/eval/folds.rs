use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::store::Label;

/// Assignment of every sample to one of `k` folds for a single round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub round: usize,
    pub k: usize,
    pub assignment: Vec<usize>,
}

impl FoldPlan {
    pub fn n_samples(&self) -> usize {
        self.assignment.len()
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignment {
            sizes[f] += 1;
        }
        sizes
    }
}

fn deal(round: usize, k: usize, n: usize, order: &[usize]) -> FoldPlan {
    let mut assignment = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        assignment[i] = pos % k;
    }
    FoldPlan {
        round,
        k,
        assignment,
    }
}

fn check(n: usize, k: usize) -> Result<()> {
    if k < 2 || n < k {
        return Err(Error::Config(format!(
            "need n >= k >= 2 for a fold plan, got n = {n}, k = {k}"
        )));
    }
    Ok(())
}

/// Seeded random permutation dealt round-robin into `k` folds.
pub fn make_fold_plan(n: usize, k: usize, round: usize, round_seed: u64) -> Result<FoldPlan> {
    check(n, k)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::stream(round_seed, &[]));
    Ok(deal(round, k, n, &order))
}

/// Like [`make_fold_plan`] but each class is shuffled separately and the
/// classes are dealt one after the other, so every fold gets a near-equal
/// share of both.
pub fn make_stratified_fold_plan(
    labels: &[Label],
    k: usize,
    round: usize,
    round_seed: u64,
) -> Result<FoldPlan> {
    check(labels.len(), k)?;
    let mut order = Vec::with_capacity(labels.len());
    for (c, class) in [Label::Low, Label::High].into_iter().enumerate() {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        members.shuffle(&mut rng::stream(round_seed, &[c as u64]));
        order.extend(members);
    }
    Ok(deal(round, k, labels.len(), &order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sizes() {
        let p = make_fold_plan(100, 10, 0, 1).unwrap();
        assert_eq!(p.fold_sizes(), vec![10; 10]);
        let mut s = make_fold_plan(25, 10, 0, 1).unwrap().fold_sizes();
        s.sort_unstable();
        assert_eq!(s, [2, 2, 2, 2, 2, 3, 3, 3, 3, 3]);
        assert!(make_fold_plan(5, 10, 0, 1).is_err());
        assert!(make_fold_plan(5, 1, 0, 1).is_err());
    }

    #[test]
    fn seeding() {
        let a = make_fold_plan(100, 10, 0, 1).unwrap();
        assert_eq!(a, make_fold_plan(100, 10, 0, 1).unwrap());
        assert_ne!(
            a.assignment,
            make_fold_plan(100, 10, 0, 2).unwrap().assignment
        );
    }

    #[test]
    fn stratified_balances_classes() {
        let labels: Vec<Label> = (0..60)
            .map(|i| if i < 20 { Label::High } else { Label::Low })
            .collect();
        let p = make_stratified_fold_plan(&labels, 10, 0, 4).unwrap();
        for f in 0..10 {
            let test = p.test_indices(f);
            assert_eq!(test.len(), 6);
            assert_eq!(
                test.iter().filter(|&&i| labels[i] == Label::High).count(),
                2
            );
        }
    }

    proptest! {
        #[test]
        fn folds_partition(n in 2usize..300, k in 2usize..12, seed in any::<u64>()) {
            prop_assume!(n >= k);
            let p = make_fold_plan(n, k, 0, seed).unwrap();
            let sizes = p.fold_sizes();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            let mut seen = vec![0; n];
            for f in 0..k {
                for i in p.test_indices(f) {
                    seen[i] += 1;
                }
                prop_assert_eq!(p.train_indices(f).len() + p.test_indices(f).len(), n);
            }
            prop_assert!(seen.iter().all(|&c| c == 1));
        }
    }
}
