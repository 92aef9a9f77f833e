use crate::balance::{compute_plan, materialize_sample, BalanceParams};
use crate::classifiers::{threshold_reports, Learner, TrainedModel};
use crate::dataset::{Dataset, QuadrantCounts};
use crate::metrics::{LossWeights, MetricReport};
use crate::seed;

use super::{key_value, EvaluationPoint, LatticeKey};

/// Evaluates one lattice point at several thresholds.
///
/// Implementations must be pure in `(params, thresholds, seed)`. The result
/// holds one entry per threshold, in order; `Err` marks an invalid point.
pub trait PointEvaluator: Sync {
    fn classifier(&self) -> String;

    /// Records in every training sample.
    fn sample_size(&self) -> usize;

    fn evaluate(&self, params: BalanceParams, thresholds: &[f64], seed: u64) -> Vec<Result<MetricReport, String>>;
}

/// Seed of the model trained at one lattice point.
///
/// The threshold is excluded so every threshold at a point reuses one model.
pub fn point_seed(global: u64, key: LatticeKey) -> u64 {
    seed::derive(global, &[u64::from(key[0]), u64::from(key[1]), u64::from(key[2])])
}

/// Samples the training set per the plan at `params`, fits the learner on
/// the sample and scores the evaluation set.
pub struct ModelInspector<'a> {
    pub train: &'a Dataset,
    pub eval: &'a Dataset,
    pub learner: &'a dyn Learner,
    pub weights: LossWeights,
    pub size: usize,
    counts: QuadrantCounts,
}

impl<'a> ModelInspector<'a> {
    pub fn new(train: &'a Dataset, eval: &'a Dataset, learner: &'a dyn Learner, weights: LossWeights, size: usize) -> Self {
        Self {
            train,
            eval,
            learner,
            weights,
            size,
            counts: train.quadrant_counts(),
        }
    }

    fn scores(&self, params: BalanceParams, seed: u64) -> Result<Vec<f64>, String> {
        let model = fit_point(self.train, &self.counts, self.learner, params, self.size, seed)?;
        model.predict_scores(self.eval).map_err(|e| e.to_string())
    }
}

impl PointEvaluator for ModelInspector<'_> {
    fn classifier(&self) -> String {
        self.learner.name()
    }

    fn sample_size(&self) -> usize {
        self.size
    }

    fn evaluate(&self, params: BalanceParams, thresholds: &[f64], seed: u64) -> Vec<Result<MetricReport, String>> {
        match self.scores(params, seed) {
            Err(e) => vec![Err(e); thresholds.len()],
            Ok(scores) => match threshold_reports(self.eval, &scores, thresholds, &self.weights) {
                Err(e) => vec![Err(e.to_string()); thresholds.len()],
                Ok(reports) => reports.into_iter().map(|r| r.map_err(|e| e.to_string())).collect(),
            },
        }
    }
}

fn fit_point(
    train: &Dataset,
    counts: &QuadrantCounts,
    learner: &dyn Learner,
    params: BalanceParams,
    size: usize,
    seed: u64,
) -> Result<TrainedModel, String> {
    let plan = compute_plan(counts, params).map_err(|e| e.to_string())?;
    let sample = materialize_sample(train, &plan, size, seed).map_err(|e| e.to_string())?;
    TrainedModel::fit(learner, &sample, seed::derive(seed, &[u64::MAX])).map_err(|e| e.to_string())
}

/// The model a search trains at `params` with point seed `seed`.
pub fn train_point(
    train: &Dataset,
    learner: &dyn Learner,
    params: BalanceParams,
    size: usize,
    seed: u64,
) -> Result<TrainedModel, String> {
    fit_point(train, &train.quadrant_counts(), learner, params, size, seed)
}

/// Averages repeated evaluations; any failure or undefined metric wins.
pub(crate) fn average(reports: Vec<Result<MetricReport, String>>, w: &LossWeights) -> Result<MetricReport, String> {
    if reports.len() == 1 {
        return reports.into_iter().next().expect("one report");
    }
    let reports: Vec<MetricReport> = reports.into_iter().collect::<Result<_, _>>()?;
    let n = reports.len() as f64;
    let mean = |f: &dyn Fn(&MetricReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
    let mean_opt = |f: &dyn Fn(&MetricReport) -> Option<f64>| {
        reports.iter().map(f).sum::<Option<f64>>().map(|s| s / n)
    };
    let mut r = MetricReport {
        di_ratio: mean_opt(&|r| r.di_ratio),
        mcc: mean_opt(&|r| r.mcc),
        accuracy: mean(&|r| r.accuracy),
        precision: mean(&|r| r.precision),
        recall: mean(&|r| r.recall),
        f1: mean(&|r| r.f1),
        di_loss: mean_opt(&|r| r.di_loss),
        mcc_loss: mean_opt(&|r| r.mcc_loss),
        combined_loss: None,
    };
    r.combined_loss = match (r.mcc_loss, r.di_loss) {
        (Some(m), Some(d)) => Some(w.combine(m, d)),
        _ => None,
    };
    Ok(r)
}

pub(crate) fn make_point(
    evaluator: &dyn PointEvaluator,
    key: LatticeKey,
    threshold_key: u32,
    level: u8,
    seed: u64,
    result: Result<MetricReport, String>,
) -> EvaluationPoint {
    let (report, failure) = match result {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e)),
    };
    EvaluationPoint {
        params: super::key_params(key),
        key,
        threshold: key_value(threshold_key),
        threshold_key,
        classifier: evaluator.classifier(),
        level,
        report,
        failure,
        sample_size: evaluator.sample_size(),
        seed,
    }
}

/// Evaluates a single `(params, threshold)` tuple with an explicit seed.
///
/// `params` and `threshold` must lie on the hundredths lattice. With the
/// seed from [`point_seed`] this reproduces the matching search result.
#[allow(clippy::too_many_arguments)]
pub fn inspect(
    train: &Dataset,
    eval: &Dataset,
    params: BalanceParams,
    learner: &dyn Learner,
    threshold: f64,
    weights: LossWeights,
    size: usize,
    seed: u64,
) -> EvaluationPoint {
    let inspector = ModelInspector::new(train, eval, learner, weights, size);
    let to_key = |v: f64| (v * f64::from(super::KEY_SCALE)).round() as u32;
    let key = [to_key(params.alpha), to_key(params.beta), to_key(params.gamma)];
    let result = inspector
        .evaluate(params, &[threshold], seed)
        .pop()
        .expect("one threshold in, one result out");
    let mut p = make_point(&inspector, key, to_key(threshold), 0, seed, result);
    p.params = params;
    p.threshold = threshold;
    p
}
