use serde::{Deserialize, Serialize};

use super::block::FeatureBlock;
use crate::error::{Error, Result};

/// Lower bound on a stored standard deviation.
pub const STD_FLOOR: f64 = 1e-8;

/// Per-feature z-scoring with statistics from a training subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    /// Population standard deviations, floored at [`STD_FLOOR`].
    pub stds: Vec<f64>,
}

impl Standardizer {
    /// Fits means and population stds over `row_indices` only.
    pub fn fit(block: &FeatureBlock, row_indices: &[usize]) -> Result<Self> {
        if row_indices.is_empty() {
            return Err(Error::Empty("Standardizer::fit"));
        }
        let dim = block.dim();
        let n = row_indices.len() as f64;
        let mut means = vec![0.0; dim];
        for &i in row_indices {
            for (m, &x) in means.iter_mut().zip(block.row(i)) {
                *m += f64::from(x);
            }
        }
        means.iter_mut().for_each(|m| *m /= n);

        let mut stds = vec![0.0; dim];
        for &i in row_indices {
            for ((s, &m), &x) in stds.iter_mut().zip(&means).zip(block.row(i)) {
                let d = f64::from(x) - m;
                *s += d * d;
            }
        }
        for s in &mut stds {
            *s = (*s / n).sqrt().max(STD_FLOOR);
        }
        Ok(Standardizer { means, stds })
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }

    /// Standardizes one row. Columns whose std sits at the floor map to 0.
    pub fn apply_row(&self, row: &[f32], out: &mut Vec<f32>) {
        out.extend(
            row.iter()
                .zip(&self.means)
                .zip(&self.stds)
                .map(|((&x, &m), &s)| {
                    if s <= STD_FLOOR {
                        0.0
                    } else {
                        ((f64::from(x) - m) / s) as f32
                    }
                }),
        );
    }

    pub fn apply(&self, block: &FeatureBlock) -> Result<FeatureBlock> {
        if block.dim() != self.dim() {
            return Err(Error::LengthMismatch {
                context: "Standardizer::apply",
                left: self.dim(),
                right: block.dim(),
            });
        }
        let mut data = Vec::with_capacity(block.as_slice().len());
        for row in block.rows() {
            self.apply_row(row, &mut data);
        }
        Ok(FeatureBlock::from_parts_unchecked(
            block.name().to_owned(),
            block.dim(),
            data,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    #[test]
    fn hand_computed() {
        let b = FeatureBlock::from_rows("X", &[vec![0.0, 2.0], vec![2.0, 4.0]]).unwrap();
        let s = Standardizer::fit(&b, &[0, 1]).unwrap();
        assert_eq!(s.means, [1.0, 3.0]);
        assert_eq!(s.stds, [1.0, 1.0]);
        let z = s.apply(&b).unwrap();
        assert_eq!(z.as_slice(), &[-1.0, -1.0, 1.0, 1.0]);
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let b = FeatureBlock::from_rows("X", &[vec![0.1, 1.0], vec![0.1, 2.0], vec![0.1, 6.0]])
            .unwrap();
        let s = Standardizer::fit(&b, &[0, 1, 2]).unwrap();
        assert_eq!(s.stds[0], STD_FLOOR);
        let z = s.apply(&b).unwrap();
        assert!(z.rows().all(|r| r[0] == 0.0));
        assert!(z.as_slice().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn only_selected_rows_count() {
        let b = FeatureBlock::from_rows("X", &[vec![1.0], vec![3.0], vec![100.0]]).unwrap();
        let s = Standardizer::fit(&b, &[0, 1]).unwrap();
        assert_eq!(s.means, [2.0]);
        assert!(Standardizer::fit(&b, &[]).is_err());
    }

    #[test]
    fn refit_moments_are_unit() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let (n, dim) = (300, 16);
        let data: Vec<f32> = (0..n * dim)
            .map(|i| rng.random_range(-5.0..5.0) * (1 + i % dim) as f32 + i as f32 % 7.0)
            .collect();
        let b = FeatureBlock::new("R", dim, data).unwrap();
        let all: Vec<usize> = (0..n).collect();
        let z = Standardizer::fit(&b, &all).unwrap().apply(&b).unwrap();
        // Oracle: recompute moments of the output directly.
        for c in 0..dim {
            let col: Vec<f64> = z.rows().map(|r| f64::from(r[c])).collect();
            let mean = col.iter().sum::<f64>() / n as f64;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
            assert!(mean.abs() < 1e-5, "col {c} mean {mean}");
            assert!(
                (var.sqrt() - 1.0).abs() < 1e-5,
                "col {c} std {}",
                var.sqrt()
            );
        }
    }
}
