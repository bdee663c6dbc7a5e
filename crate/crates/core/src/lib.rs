//! Fuzzy ID3 decision trees for software effort estimation.
//!
//! The pipeline runs: [`dataset`] (load, filter, impute, split, normalize)
//! → [`induction`] (fuzzify and grow a tree) → [`inference`] (class
//! activations and defuzzification to hours) → [`evaluation`] (MMRE, Pred and
//! threshold sweeps). [`model`] bundles a tree with its normalization.

pub mod dataset;
pub mod evaluation;
pub mod fuzzy;
pub mod induction;
pub mod inference;
pub mod model;

pub use dataset::{Dataset, DatasetError, Feature, NormalizationParams, Platform, ProjectRecord};
pub use evaluation::{EvaluationError, EvaluationReport, PredictionPair, SweepConfig};
pub use fuzzy::{FuzzyError, FuzzyPartition, TNormKind, TrapezoidalSet};
pub use induction::{FuzzyTree, GrowthConfig, InductionError, StopCriterion};
pub use inference::{ClassActivation, InferenceError, InferenceMode};
pub use model::{predict_effort, train_effort_model, EffortModel, Prediction};

/// Any failure surfaced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
    #[error(transparent)]
    Induction(#[from] InductionError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error(transparent)]
    Evaluation(#[from] EvaluationError),
    #[error("model file line {line}: {reason}")]
    ModelFormat { line: usize, reason: String },
}
