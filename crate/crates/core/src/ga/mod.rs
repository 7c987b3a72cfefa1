//! Mixed-integer genetic algorithm that selects features and fits the linear
//! weights over them at the same time.
//!
//! An individual carries a binary mask, a real weight per feature and a bias.
//! Its prediction is `sum_j x_j * (mask_j * w_j) + b`, and its fitness is the
//! mean hinge loss (classification) or mean Smooth-L1 loss (regression) of
//! those predictions. Lower is better.

mod chromosome;
mod config;
mod evolve;
mod operators;

pub use chromosome::{fitness, Chromosome, Targets};
pub use config::GaConfig;
pub use evolve::{evolve, init_population, GaOutcome, GaTrace, TraceRow};
pub use operators::{blend, crossover, mutate, select_tournament};
