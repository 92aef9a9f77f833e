//! Balance-structure resampling for doubly imbalanced binary classification.
//!
//! A dataset is doubly imbalanced when both its label distribution and its
//! privilege-group distribution are skewed. This crate computes sampling
//! plans that move a training set toward a target balance structure given by
//! three interpolation parameters, searches that parameter space for the best
//! trade-off between disparate impact and the Matthews correlation
//! coefficient, and extracts the Pareto front of the two losses.
//!
//! Modules map onto the pipeline stages:
//!
//! * [`dataset`]: CSV ingestion, quadrant partitioning, stratified splits,
//!   feature preprocessing and a synthetic data generator.
//! * [`balance`]: sampling ratios, restriction checks, feasible sample sizes
//!   and seeded sample materialization.
//! * [`metrics`]: disparate impact, MCC, basic classification scores and
//!   their losses.
//! * [`classifiers`]: small reference learners behind a pluggable trait.
//! * [`search`]: model inspection, the two-level grid search and Pareto
//!   analysis.
//!
//! Grid evaluation runs on rayon when the `parallel` feature is enabled (the
//! default); see [`par`].

pub mod balance;
pub mod classifiers;
pub mod dataset;
pub mod metrics;
pub mod par;
pub mod search;
pub mod seed;

pub use balance::{BalanceParams, SamplingPlan, SetupPreset};
pub use classifiers::{ClassifierKind, ClassifierSpec, TrainedModel};
pub use dataset::{Dataset, QuadrantCounts, Schema};
pub use metrics::{LossWeights, MetricReport};
pub use par::Execution;
pub use search::{EvaluationPoint, GridSpec, ParetoFront};
