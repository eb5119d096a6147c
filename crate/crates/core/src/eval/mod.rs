//! Task metrics, evaluation protocols, ablation tables and MI feature ranking.

mod ablation;
mod metrics;
mod mi;
mod protocols;

pub use ablation::{ablation_run, group, AblationRow, AblationTable, Group, Protocol, ADR_ABLATION, GROUPS, INTAKE_ABLATION};
pub use metrics::{confusion, micro_prf, prf_class, Confusion, MetricReport, Prf};
pub use mi::{mi_rank, mutual_information, render_ranking};
pub use protocols::{augmented_fold_cv, augmented_splits, fold_assignment, holdout_eval, kfold_cv, kfold_splits, CvReport, Split};
