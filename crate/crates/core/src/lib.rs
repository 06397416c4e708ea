//! Balance-aware tree ensembles for imbalanced binary classification.
//!
//! The crate covers the whole pipeline for a tabular cohort with a rare
//! positive class:
//!
//! * [`data`]: CSV ingestion into a typed [`Dataset`] with explicit missing cells.
//! * [`preprocess`]: missingness filtering, balanced-subsample median/mode
//!   imputation and one-hot encoding.
//! * [`sampling`]: random under-sampling, bootstrap and stratified folds.
//! * [`tree`]: a weighted CART tree (Gini) with mean-decrease-in-impurity importances.
//! * [`ensemble`]: Balanced Random Forest, EasyEnsemble, RUSBoost and balanced bagging.
//! * [`metrics`]: confusion matrices, balanced accuracy, macro scores, ROC and AUC.
//! * [`eval`]: stratified K-fold evaluation, synthetic cohorts and report files.
//!
//! The `balens` binary wraps the pipeline as `synth`, `preprocess`,
//! `evaluate` and `report` subcommands (see [`cli`]).

pub mod cli;
pub mod data;
pub mod ensemble;
pub mod error;
pub mod eval;
pub mod matrix;
pub mod metrics;
pub mod preprocess;
pub mod report;
pub mod rng;
pub mod sampling;
pub mod tree;

pub use data::{Cell, Dataset, FeatureKind, FeatureSpec};
pub use ensemble::{ClassifierKind, EnsembleModel, Hyperparams};
pub use error::{Error, Result};
pub use eval::{run_experiment, EvalReport, ExperimentConfig};
pub use matrix::Matrix;
pub use metrics::{ConfusionMatrix, MetricsRecord, RocCurve};
pub use preprocess::{EncodedMatrix, ImputationPlan};
pub use tree::{TreeModel, TreeParams};
