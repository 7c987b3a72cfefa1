//! Facial image aesthetics from fused CNN features.
//!
//! The crate covers everything downstream of feature extraction:
//!
//! - [`store`]: feature blocks (image quality `IQ`, generic aesthetics `IA`,
//!   facial attributes `FA`), the FVEC file format, dataset manifests,
//!   median-split labels and train-fold standardization.
//! - [`linear`]: linear SVM / SVR baselines trained by averaged SGD, the
//!   hinge and Smooth-L1 losses, and the model file format.
//! - [`ga`]: a mixed-integer genetic algorithm that selects features and fits
//!   linear weights at the same time, seeded from the linear baseline.
//! - [`eval`]: repeated k-fold cross-validation, GCR and LCC, and the sweep
//!   over block combinations.
//! - [`synth`]: synthetic datasets with a known ground truth.
//!
//! The guide under `book/` walks through each part with runnable examples;
//! its code blocks are compiled and run as doc-tests of this crate.

pub mod error;
pub mod eval;
pub mod ga;
pub mod linear;
pub mod rng;
pub mod store;
pub mod synth;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/features.md")]
    mod features {}
    #[doc = include_str!("../../../book/src/linear.md")]
    mod linear {}
    #[doc = include_str!("../../../book/src/genetic.md")]
    mod genetic {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
