use serde::{Deserialize, Serialize};

use super::dot;
use crate::error::{Error, Result};
use crate::store::FeatureBlock;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Classification,
    Regression,
}

impl std::str::FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "classification" => Ok(Task::Classification),
            "regression" => Ok(Task::Regression),
            other => Err(format!("unknown task {other:?}")),
        }
    }
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Task::Classification => "classification",
            Task::Regression => "regression",
        })
    }
}

/// Weight vector plus bias; `predict(x) = <w, x> + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub task: Task,
}

impl LinearModel {
    pub fn new(weights: Vec<f64>, bias: f64, task: Task) -> Result<Self> {
        if !bias.is_finite() || weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Config("model parameters must be finite".into()));
        }
        Ok(LinearModel {
            weights,
            bias,
            task,
        })
    }

    pub fn zeros(dim: usize, task: Task) -> Self {
        LinearModel {
            weights: vec![0.0; dim],
            bias: 0.0,
            task,
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn predict<T: Copy + Into<f64>>(&self, row: &[T]) -> Result<f64> {
        if row.len() != self.weights.len() {
            return Err(Error::LengthMismatch {
                context: "LinearModel::predict",
                left: self.weights.len(),
                right: row.len(),
            });
        }
        Ok(dot(&self.weights, row) + self.bias)
    }

    /// Predictions for every row of a block.
    pub fn decision_values(&self, block: &FeatureBlock) -> Result<Vec<f64>> {
        if block.dim() != self.weights.len() {
            return Err(Error::LengthMismatch {
                context: "LinearModel::decision_values",
                left: self.weights.len(),
                right: block.dim(),
            });
        }
        Ok(block
            .rows()
            .map(|r| dot(&self.weights, r) + self.bias)
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    #[test]
    fn hand_examples() {
        let m = LinearModel::new(vec![2.0, 5.0], 1.0, Task::Regression).unwrap();
        assert_eq!(m.predict(&[3.0, 10.0]).unwrap(), 57.0);
        let z = LinearModel::zeros(3, Task::Classification);
        assert_eq!(z.predict(&[1.0f32, -4.0, 9.0]).unwrap(), 0.0);
        assert!(m.predict(&[1.0]).is_err());
        assert!(LinearModel::new(vec![f64::NAN], 0.0, Task::Regression).is_err());
    }

    #[test]
    fn matches_naive_summation_4096() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let w: Vec<f64> = (0..4096).map(|_| rng.random_range(-1.0..1.0)).collect();
            let x: Vec<f64> = (0..4096).map(|_| rng.random_range(-3.0..3.0)).collect();
            let b = rng.random_range(-1.0..1.0);
            let m = LinearModel::new(w.clone(), b, Task::Regression).unwrap();
            // Oracle: pairwise (tree) summation, a different association order.
            fn pairwise(v: &[f64]) -> f64 {
                if v.len() <= 2 {
                    v.iter().sum()
                } else {
                    let (l, r) = v.split_at(v.len() / 2);
                    pairwise(l) + pairwise(r)
                }
            }
            let terms: Vec<f64> = w.iter().zip(&x).map(|(a, b)| a * b).collect();
            let expected = pairwise(&terms) + b;
            let got = m.predict(&x).unwrap();
            let scale = terms.iter().map(|t| t.abs()).sum::<f64>() + b.abs();
            assert!(
                (got - expected).abs() <= 1e-9 * scale,
                "{got} vs {expected}"
            );
        }
    }

    #[test]
    fn weight_part_is_linear() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let w: Vec<f64> = (0..64).map(|_| rng.random_range(-1.0..1.0)).collect();
        let m = LinearModel::new(w, 0.7, Task::Regression).unwrap();
        let x: Vec<f64> = (0..64).map(|_| rng.random_range(-1.0..1.0)).collect();
        let z: Vec<f64> = (0..64).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (a, b) = (1.7, -0.3);
        let mix: Vec<f64> = x.iter().zip(&z).map(|(x, z)| a * x + b * z).collect();
        let part = |v: &[f64]| m.predict(v).unwrap() - m.bias;
        let lhs = part(&mix);
        let rhs = a * part(&x) + b * part(&z);
        assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
    }
}
