//! Unsupervised label refinement for dataless text classifiers.
//!
//! A dataless classifier scores documents against category descriptions
//! without labeled data. This crate treats those scores as the starting point
//! of a k-means style loop whose centroids stay tied to the category
//! descriptions, and provides the evaluation tooling around it.

pub mod cli;
pub mod encode;
pub mod error;
pub mod eval;
pub mod exec;
pub mod geometry;
pub mod io;
pub mod model;
pub mod refine;

pub use error::{Error, Result};
pub use exec::Exec;
pub use model::{
    CategorySet, CentroidWeights, EarlyStopping, EmbeddingMatrix, Metric, Polarity,
    ProbabilityMatrix, RefinementConfig, RefinementResult, ScoreMatrix,
};
pub use refine::{
    cluster_random_init, refine_dual, refine_fewshot, refine_single, AugmentedInputs,
    LabeledAnchors,
};
