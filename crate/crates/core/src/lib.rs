//! Tweet classification toolkit for adverse drug reaction (ADR) detection and
//! medication-intake classification.
//!
//! The crate is organised as a pipeline:
//!
//! * [`corpus`] loads labeled TSV corpora, removes near-duplicates, counts classes.
//! * [`textprep`] normalizes URLs and mentions, tokenizes, marks negation scope, stems.
//! * [`resources`] loads term lexicons, scored lexicons, embeddings and word clusters.
//! * [`features`] turns a tweet into a sparse vector according to a [`FeatureConfig`].
//! * [`svm`] trains linear SVMs with per-class costs by dual coordinate descent.
//! * [`imbalance`] handles skewed class distributions by under-sampling and voting ensembles.
//! * [`eval`] computes the task metrics, cross-validation, ablation tables and MI rankings.
//! * [`pipeline`] ties the pieces into trainable, serializable models.
//! * [`cli`] implements the `medtweet` command-line tool on top of the above.
//!
//! See the `examples/` directory of this crate for one runnable program per capability.

pub mod cli;
pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod imbalance;
pub mod pipeline;
pub mod resources;
pub mod svm;
pub mod synthetic;
pub mod textprep;

pub use corpus::{ClassCounts, ClassId, Dataset, Tweet};
pub use error::{Error, Result};
pub use features::{FeatureConfig, FeatureSpace, FeatureVector};
pub use pipeline::{PipelineConfig, Task, TrainedPipeline};
pub use resources::Resources;
pub use svm::{LinearModel, TrainParams};
