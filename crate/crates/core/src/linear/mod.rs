//! Dense linear predictors, the losses they are trained and scored with, and
//! the on-disk model format.

mod loss;
mod model;
pub mod persist;
mod train;

pub use loss::{
    epsilon_insensitive_loss, hinge, hinge_loss, smooth_l1, smooth_l1_grad, smooth_l1_loss,
};
pub use model::{LinearModel, Task};
pub use persist::{ModelFile, ModelHeader};
pub use train::{
    train_svm, train_svm_traced, train_svr, train_svr_traced, SolverTrace, TrainConfig,
};

/// Left-to-right dot product accumulated in f64.
#[inline]
pub(crate) fn dot<T: Copy + Into<f64>>(weights: &[f64], row: &[T]) -> f64 {
    let mut acc = 0.0;
    for (&w, &x) in weights.iter().zip(row) {
        acc += x.into() * w;
    }
    acc
}
