//! Cross-validation protocol, metrics and the block-combination sweep.

mod folds;
mod metrics;
mod protocol;
mod sweep;

pub use folds::{make_fold_plan, make_stratified_fold_plan, FoldPlan};
pub use metrics::{gcr, lcc};
pub use protocol::{
    fold_plans, run_protocol, run_protocol_observed, with_threads, Dataset, EvalReport, FoldAudit,
    FoldObserver, FoldReport, Method, Metric, ProtocolConfig, RoundReport,
};
pub use sweep::{combination_order, sweep_combinations, SweepTable, TableRow};
