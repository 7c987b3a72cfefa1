//! Feature blocks, their on-disk formats, dataset manifests and
//! train-fold standardization.

mod block;
pub mod fvec;
mod manifest;
mod standardize;
mod validate;

pub use block::{canonical_dim, canonical_rank, concat_blocks, sort_canonical, FeatureBlock};
pub use fvec::{load_block, write_block};
pub use manifest::{median_split, DatasetManifest, ExtractionInfo, Label, SampleRecord};
pub use standardize::{Standardizer, STD_FLOOR};
pub use validate::{validate_dataset, BlockSummary, Diagnostic, ValidationReport};
