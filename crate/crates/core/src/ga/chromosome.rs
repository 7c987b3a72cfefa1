use crate::error::{Error, Result};
use crate::linear::{hinge_loss, smooth_l1_loss, LinearModel, ModelFile, Task};
use crate::store::{FeatureBlock, Label, Standardizer};

/// GA individual: selection mask, per-feature weights, bias.
#[derive(Debug, Clone, PartialEq)]
pub struct Chromosome {
    pub mask: Vec<bool>,
    pub weights: Vec<f64>,
    pub bias: f64,
}

/// Training targets; the variant decides which fitness is used.
#[derive(Debug, Clone, Copy)]
pub enum Targets<'a> {
    Classification(&'a [Label]),
    Regression(&'a [f64]),
}

impl Targets<'_> {
    pub fn len(&self) -> usize {
        match self {
            Targets::Classification(l) => l.len(),
            Targets::Regression(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn task(&self) -> Task {
        match self {
            Targets::Classification(_) => Task::Classification,
            Targets::Regression(_) => Task::Regression,
        }
    }
}

impl Chromosome {
    pub fn new(mask: Vec<bool>, weights: Vec<f64>, bias: f64) -> Result<Self> {
        if mask.len() != weights.len() {
            return Err(Error::LengthMismatch {
                context: "Chromosome::new",
                left: mask.len(),
                right: weights.len(),
            });
        }
        if !bias.is_finite() || weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Config("chromosome parameters must be finite".into()));
        }
        Ok(Chromosome {
            mask,
            weights,
            bias,
        })
    }

    /// All features selected, weights and bias copied from `model`.
    pub fn from_model(model: &LinearModel) -> Self {
        Chromosome {
            mask: vec![true; model.dim()],
            weights: model.weights.clone(),
            bias: model.bias,
        }
    }

    pub fn n_features(&self) -> usize {
        self.mask.len()
    }

    pub fn selected_count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn selected_indices(&self) -> Vec<usize> {
        self.mask
            .iter()
            .enumerate()
            .filter_map(|(j, &b)| b.then_some(j))
            .collect()
    }

    /// Weights with unselected features zeroed.
    pub fn effective_weights(&self) -> Vec<f64> {
        self.mask
            .iter()
            .zip(&self.weights)
            .map(|(&m, &w)| if m { w } else { 0.0 })
            .collect()
    }

    pub fn predict<T: Copy + Into<f64>>(&self, row: &[T]) -> Result<f64> {
        if row.len() != self.mask.len() {
            return Err(Error::LengthMismatch {
                context: "Chromosome::predict",
                left: self.mask.len(),
                right: row.len(),
            });
        }
        let mut acc = 0.0;
        for ((&x, &m), &w) in row.iter().zip(&self.mask).zip(&self.weights) {
            if m {
                acc += x.into() * w;
            }
        }
        Ok(acc + self.bias)
    }

    /// Predictions for every row, touching only the selected columns.
    pub fn predictions(&self, block: &FeatureBlock) -> Result<Vec<f64>> {
        if block.dim() != self.mask.len() {
            return Err(Error::LengthMismatch {
                context: "Chromosome::predictions",
                left: self.mask.len(),
                right: block.dim(),
            });
        }
        let selected: Vec<(usize, f64)> = self
            .selected_indices()
            .into_iter()
            .map(|j| (j, self.weights[j]))
            .collect();
        Ok(block
            .rows()
            .map(|row| {
                let mut acc = 0.0;
                for &(j, w) in &selected {
                    acc += f64::from(row[j]) * w;
                }
                acc + self.bias
            })
            .collect())
    }

    pub fn to_model(&self, task: Task) -> LinearModel {
        LinearModel {
            weights: self.effective_weights(),
            bias: self.bias,
            task,
        }
    }

    /// Model file holding the raw weights plus the mask section.
    pub fn to_model_file(
        &self,
        task: Task,
        standardizer: Option<Standardizer>,
        config: serde_json::Value,
    ) -> ModelFile {
        ModelFile {
            model: LinearModel {
                weights: self.weights.clone(),
                bias: self.bias,
                task,
            },
            standardizer,
            mask: Some(self.mask.clone()),
            config,
        }
    }
}

/// Mean hinge loss (classification) or mean Smooth-L1 loss (regression) of
/// the chromosome's predictions.
pub fn fitness(c: &Chromosome, features: &FeatureBlock, targets: Targets) -> Result<f64> {
    if features.n_rows() != targets.len() {
        return Err(Error::LengthMismatch {
            context: "fitness",
            left: features.n_rows(),
            right: targets.len(),
        });
    }
    let preds = c.predictions(features)?;
    match targets {
        Targets::Classification(labels) => hinge_loss(&preds, labels),
        Targets::Regression(scores) => smooth_l1_loss(&preds, scores),
    }
}
