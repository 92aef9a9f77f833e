//! Reference classifiers behind a pluggable interface.
//!
//! Every learner produces a score in `[0, 1]` where higher means more likely
//! unfavourable. [`TrainedModel`] bundles the fitted feature pipeline with
//! the scorer so raw datasets can be scored directly.

mod forest;
pub mod logistic;
mod naive_bayes;
pub mod svm;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, FeatureLayout, FeaturePipeline, Label, PipelineError};
use crate::metrics::{
    ConfusionCounts, GroupRates, GroupedPredictions, LossWeights, MetricReport, MetricsError, PredictionRecord,
};

pub use forest::{ForestParams, RandomForest};
pub use logistic::{LogisticModel, LogisticParams, LogisticSolver};
pub use naive_bayes::{NaiveBayes, NaiveBayesParams};
pub use svm::{LinearSvm, SvmParams};

#[derive(Debug, thiserror::Error)]
pub enum ClassifierError {
    #[error("training set must contain both labels")]
    SingleClass,
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
    #[error("threshold {0} outside (0, 1)")]
    InvalidThreshold(f64),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error("expected {expected} scores, got {got}")]
    ScoreCount { expected: usize, got: usize },
    #[error("external scores: {0}")]
    ExternalScores(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// A fitted scoring function over transformed feature rows.
pub trait Scorer: Send + Sync + fmt::Debug {
    /// Unfavourable-label score in `[0, 1]` for every row of `x`.
    fn score(&self, x: ArrayView2<'_, f64>) -> Vec<f64>;
}

/// Anything that can be trained into a [`Scorer`].
///
/// `unfavourable[i]` is the label of row `i`. Implementations must be
/// deterministic in `seed`.
pub trait Learner: Send + Sync {
    fn name(&self) -> String;

    fn fit(
        &self,
        x: ArrayView2<'_, f64>,
        unfavourable: &[bool],
        layout: &FeatureLayout,
        seed: u64,
    ) -> Result<Box<dyn Scorer>, ClassifierError>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassifierKind {
    LogisticRegression,
    NaiveBayes,
    RandomForest,
    LinearSvm,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 4] = [
        ClassifierKind::LogisticRegression,
        ClassifierKind::NaiveBayes,
        ClassifierKind::RandomForest,
        ClassifierKind::LinearSvm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::LogisticRegression => "logistic-regression",
            ClassifierKind::NaiveBayes => "naive-bayes",
            ClassifierKind::RandomForest => "random-forest",
            ClassifierKind::LinearSvm => "linear-svm",
        }
    }

    /// Table label: LR, NB, RF or SVM.
    pub fn short_name(self) -> &'static str {
        match self {
            ClassifierKind::LogisticRegression => "LR",
            ClassifierKind::NaiveBayes => "NB",
            ClassifierKind::RandomForest => "RF",
            ClassifierKind::LinearSvm => "SVM",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassifierKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        ClassifierKind::ALL
            .into_iter()
            .find(|k| k.name() == lower || k.short_name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown classifier `{s}`"))
    }
}

/// A classifier kind with its hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ClassifierSpec {
    LogisticRegression(#[serde(default)] LogisticParams),
    NaiveBayes(#[serde(default)] NaiveBayesParams),
    RandomForest(#[serde(default)] ForestParams),
    LinearSvm(#[serde(default)] SvmParams),
}

impl ClassifierSpec {
    pub fn default_for(kind: ClassifierKind) -> Self {
        match kind {
            ClassifierKind::LogisticRegression => Self::LogisticRegression(Default::default()),
            ClassifierKind::NaiveBayes => Self::NaiveBayes(Default::default()),
            ClassifierKind::RandomForest => Self::RandomForest(Default::default()),
            ClassifierKind::LinearSvm => Self::LinearSvm(Default::default()),
        }
    }

    pub fn kind(&self) -> ClassifierKind {
        match self {
            Self::LogisticRegression(_) => ClassifierKind::LogisticRegression,
            Self::NaiveBayes(_) => ClassifierKind::NaiveBayes,
            Self::RandomForest(_) => ClassifierKind::RandomForest,
            Self::LinearSvm(_) => ClassifierKind::LinearSvm,
        }
    }

    pub fn validate(&self) -> Result<(), ClassifierError> {
        match self {
            Self::LogisticRegression(p) => p.validate(),
            Self::NaiveBayes(p) => p.validate(),
            Self::RandomForest(p) => p.validate(),
            Self::LinearSvm(p) => p.validate(),
        }
    }
}

impl Learner for ClassifierSpec {
    fn name(&self) -> String {
        self.kind().short_name().to_string()
    }

    fn fit(
        &self,
        x: ArrayView2<'_, f64>,
        unfavourable: &[bool],
        layout: &FeatureLayout,
        seed: u64,
    ) -> Result<Box<dyn Scorer>, ClassifierError> {
        self.validate()?;
        Ok(match self {
            Self::LogisticRegression(p) => Box::new(LogisticModel::fit(x, unfavourable, p)),
            Self::NaiveBayes(p) => Box::new(NaiveBayes::fit(x, unfavourable, layout, p)),
            Self::RandomForest(p) => Box::new(RandomForest::fit(x, unfavourable, p, seed)),
            Self::LinearSvm(p) => Box::new(LinearSvm::fit(x, unfavourable, p)),
        })
    }
}

/// A feature pipeline and scorer fitted on the same training set.
#[derive(Debug)]
pub struct TrainedModel {
    pub name: String,
    pub pipeline: FeaturePipeline,
    pub scorer: Box<dyn Scorer>,
}

impl TrainedModel {
    /// Fits the pipeline on `train`, then the learner on the transformed rows.
    pub fn fit(learner: &dyn Learner, train: &Dataset, seed: u64) -> Result<Self, ClassifierError> {
        let y: Vec<bool> = train.labels().map(Label::is_unfavourable).collect();
        if !(y.iter().any(|&u| u) && y.iter().any(|&u| !u)) {
            return Err(ClassifierError::SingleClass);
        }
        let pipeline = FeaturePipeline::fitted_on(train);
        let x = pipeline.transform(train)?;
        let layout = pipeline.layout()?;
        let scorer = learner.fit(x.view(), &y, &layout, seed)?;
        Ok(Self {
            name: learner.name(),
            pipeline,
            scorer,
        })
    }

    pub fn predict_scores(&self, d: &Dataset) -> Result<Vec<f64>, ClassifierError> {
        let x = self.pipeline.transform(d)?;
        Ok(self.scorer.score(x.view()))
    }

    pub fn predict_labels(&self, d: &Dataset, threshold: f64) -> Result<GroupedPredictions, ClassifierError> {
        check_threshold(threshold)?;
        labels_from_scores(d, &self.predict_scores(d)?, threshold)
    }
}

pub fn check_threshold(threshold: f64) -> Result<(), ClassifierError> {
    if threshold > 0.0 && threshold < 1.0 {
        Ok(())
    } else {
        Err(ClassifierError::InvalidThreshold(threshold))
    }
}

/// Labels a record unfavourable iff its score is at least `threshold`.
pub fn labels_from_scores(
    d: &Dataset,
    scores: &[f64],
    threshold: f64,
) -> Result<GroupedPredictions, ClassifierError> {
    check_threshold(threshold)?;
    if scores.len() != d.len() {
        return Err(ClassifierError::ScoreCount {
            expected: d.len(),
            got: scores.len(),
        });
    }
    let records = d
        .records()
        .iter()
        .zip(scores)
        .map(|(r, &s)| PredictionRecord {
            privileged: r.privileged,
            actual: r.label,
            predicted: if s >= threshold {
                Label::Unfavourable
            } else {
                Label::Favourable
            },
        })
        .collect();
    Ok(GroupedPredictions::new(records))
}

/// Metric reports at several thresholds without materializing predictions.
///
/// Equal to [`labels_from_scores`] followed by
/// [`MetricReport::from_predictions`] at each threshold.
pub fn threshold_reports(
    d: &Dataset,
    scores: &[f64],
    thresholds: &[f64],
    weights: &LossWeights,
) -> Result<Vec<Result<MetricReport, MetricsError>>, ClassifierError> {
    if scores.len() != d.len() {
        return Err(ClassifierError::ScoreCount {
            expected: d.len(),
            got: scores.len(),
        });
    }
    thresholds.iter().try_for_each(|&t| check_threshold(t))?;
    Ok(thresholds
        .iter()
        .map(|&t| {
            let mut c = ConfusionCounts::default();
            let mut g = GroupRates::default();
            for (r, &s) in d.records().iter().zip(scores) {
                let flagged = s >= t;
                match (r.label.is_unfavourable(), flagged) {
                    (true, true) => c.tp += 1,
                    (false, false) => c.tn += 1,
                    (false, true) => c.fp += 1,
                    (true, false) => c.fn_ += 1,
                }
                if r.privileged {
                    g.privileged_total += 1;
                    g.privileged_flagged += usize::from(flagged);
                } else {
                    g.unprivileged_total += 1;
                    g.unprivileged_flagged += usize::from(flagged);
                }
            }
            MetricReport::from_counts(&c, &g, weights)
        })
        .collect())
}

/// Reads externally produced scores: a headered CSV of `(index, score)`
/// rows covering record indices `0..n` exactly once each.
pub fn load_external_scores(path: impl AsRef<Path>, n: usize) -> Result<Vec<f64>, ClassifierError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut scores = vec![f64::NAN; n];
    for (line, row) in rdr.records().enumerate() {
        let row = row?;
        let bad = |what: &str| ClassifierError::ExternalScores(format!("row {}: {what}", line + 1));
        let idx: usize = row.get(0).and_then(|s| s.parse().ok()).ok_or_else(|| bad("bad index"))?;
        let score: f64 = row.get(1).and_then(|s| s.parse().ok()).ok_or_else(|| bad("bad score"))?;
        if idx >= n {
            return Err(bad("index out of range"));
        }
        if !(0.0..=1.0).contains(&score) {
            return Err(bad("score outside [0, 1]"));
        }
        if !scores[idx].is_nan() {
            return Err(bad("duplicate index"));
        }
        scores[idx] = score;
    }
    if let Some(missing) = scores.iter().position(|s| s.is_nan()) {
        return Err(ClassifierError::ExternalScores(format!("no score for record {missing}")));
    }
    Ok(scores)
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}
