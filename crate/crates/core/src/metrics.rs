//! Fairness and classification metrics with their losses.
//!
//! The positive class throughout is the unfavourable label. Metrics that can
//! divide by zero are `Option<f64>`; `None` is the undefined value and is
//! rendered as `NaN` in tables.

use serde::{Deserialize, Serialize};

use crate::dataset::Label;

/// Lower and upper edges of the acceptable disparate-impact band.
pub const DI_ACCEPTABLE: (f64, f64) = (0.8, 1.2);

/// Decimal places used for table cells.
pub const TABLE_PRECISION: usize = 6;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MetricsError {
    #[error("{0} group has no records")]
    EmptyGroup(&'static str),
    #[error("loss weights must be non-negative and not both zero, got ({0}, {1})")]
    InvalidWeights(f64, f64),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn new(tp: usize, tn: usize, fp: usize, fn_: usize) -> Self {
        Self { tp, tn, fp, fn_ }
    }

    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub privileged: bool,
    pub actual: Label,
    pub predicted: Label,
}

/// Per-record predictions tagged with group membership.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GroupedPredictions {
    pub records: Vec<PredictionRecord>,
}

/// Predicted-unfavourable counts and group sizes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GroupRates {
    pub privileged_flagged: usize,
    pub privileged_total: usize,
    pub unprivileged_flagged: usize,
    pub unprivileged_total: usize,
}

impl GroupedPredictions {
    pub fn new(records: Vec<PredictionRecord>) -> Self {
        Self { records }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn confusion(&self) -> ConfusionCounts {
        let mut c = ConfusionCounts::default();
        for r in &self.records {
            match (r.actual.is_unfavourable(), r.predicted.is_unfavourable()) {
                (true, true) => c.tp += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fp += 1,
                (true, false) => c.fn_ += 1,
            }
        }
        c
    }

    pub fn group_rates(&self) -> GroupRates {
        let mut g = GroupRates::default();
        for r in &self.records {
            let flagged = r.predicted.is_unfavourable() as usize;
            if r.privileged {
                g.privileged_total += 1;
                g.privileged_flagged += flagged;
            } else {
                g.unprivileged_total += 1;
                g.unprivileged_flagged += flagged;
            }
        }
        g
    }
}

/// Disparate-impact ratio from group counts; see [`di_ratio`].
pub fn di_ratio_from_rates(g: &GroupRates) -> Result<Option<f64>, MetricsError> {
    if g.privileged_total == 0 {
        return Err(MetricsError::EmptyGroup("privileged"));
    }
    if g.unprivileged_total == 0 {
        return Err(MetricsError::EmptyGroup("unprivileged"));
    }
    let privileged = g.privileged_flagged as f64 / g.privileged_total as f64;
    let unprivileged = g.unprivileged_flagged as f64 / g.unprivileged_total as f64;
    Ok((privileged > 0.0).then(|| unprivileged / privileged))
}

/// Predicted-unfavourable rate of the unprivileged group over that of the
/// privileged group. `None` when no privileged record is flagged.
pub fn di_ratio(g: &GroupedPredictions) -> Result<Option<f64>, MetricsError> {
    di_ratio_from_rates(&g.group_rates())
}

/// Matthews correlation coefficient; `None` when any marginal is zero.
pub fn mcc(c: &ConfusionCounts) -> Option<f64> {
    let (tp, tn, fp, fn_) = (c.tp as f64, c.tn as f64, c.fp as f64, c.fn_ as f64);
    let marginals = [tp + fp, tp + fn_, tn + fp, tn + fn_];
    if marginals.contains(&0.0) {
        return None;
    }
    let denom = marginals.iter().product::<f64>().sqrt();
    Some((tp * tn - fp * fn_) / denom)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BasicMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Accuracy, precision, recall and F1 for the unfavourable label. Ratios with
/// a zero denominator are reported as 0.
pub fn basic_metrics(c: &ConfusionCounts) -> BasicMetrics {
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    BasicMetrics {
        accuracy: ratio(c.tp + c.tn, c.total()),
        precision,
        recall,
        f1,
    }
}

/// Coefficients of the combined loss.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    /// Weight of the MCC loss.
    pub c1: f64,
    /// Weight of the disparate-impact loss.
    pub c2: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self { c1: 1.0, c2: 1.0 }
    }
}

impl LossWeights {
    pub fn new(c1: f64, c2: f64) -> Result<Self, MetricsError> {
        let w = Self { c1, c2 };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<(), MetricsError> {
        let ok = self.c1 >= 0.0 && self.c2 >= 0.0 && self.c1 + self.c2 > 0.0;
        if ok && self.c1.is_finite() && self.c2.is_finite() {
            Ok(())
        } else {
            Err(MetricsError::InvalidWeights(self.c1, self.c2))
        }
    }

    /// `c1 * mcc_loss + c2 * di_loss`.
    pub fn combine(&self, mcc_loss: f64, di_loss: f64) -> f64 {
        self.c1 * mcc_loss + self.c2 * di_loss
    }
}

/// `|1 - di|`.
pub fn di_loss(di: f64) -> f64 {
    (1.0 - di).abs()
}

/// `|1 - mcc|`.
pub fn mcc_loss(mcc: f64) -> f64 {
    (1.0 - mcc).abs()
}

pub fn is_di_acceptable(di: f64) -> bool {
    (DI_ACCEPTABLE.0..=DI_ACCEPTABLE.1).contains(&di)
}

/// Every metric of one evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub di_ratio: Option<f64>,
    pub mcc: Option<f64>,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub di_loss: Option<f64>,
    pub mcc_loss: Option<f64>,
    pub combined_loss: Option<f64>,
}

impl MetricReport {
    pub fn from_parts(
        di_ratio: Option<f64>,
        mcc: Option<f64>,
        basic: BasicMetrics,
        weights: &LossWeights,
    ) -> Self {
        let di_l = di_ratio.map(di_loss);
        let mcc_l = mcc.map(mcc_loss);
        let mut r = Self {
            di_ratio,
            mcc,
            accuracy: basic.accuracy,
            precision: basic.precision,
            recall: basic.recall,
            f1: basic.f1,
            di_loss: di_l,
            mcc_loss: mcc_l,
            combined_loss: None,
        };
        r.combined_loss = combined_loss(&r, weights);
        r
    }

    pub fn from_predictions(
        g: &GroupedPredictions,
        weights: &LossWeights,
    ) -> Result<Self, MetricsError> {
        Self::from_counts(&g.confusion(), &g.group_rates(), weights)
    }

    /// Same as [`Self::from_predictions`] given the tallies it would compute.
    pub fn from_counts(
        c: &ConfusionCounts,
        g: &GroupRates,
        weights: &LossWeights,
    ) -> Result<Self, MetricsError> {
        Ok(Self::from_parts(di_ratio_from_rates(g)?, mcc(c), basic_metrics(c), weights))
    }

    /// Both losses defined.
    pub fn is_valid(&self) -> bool {
        self.combined_loss.is_some()
    }

    /// Column names of the metric table.
    pub const TABLE_HEADER: [&'static str; 8] = [
        "model", "C.Loss", "DI Ratio", "MCC", "Precision", "Recall", "F1", "Accuracy",
    ];

    /// One metric table row; undefined cells are `NaN`.
    pub fn table_row(&self, model: &str) -> Vec<String> {
        vec![
            model.to_string(),
            format_cell(self.combined_loss),
            format_cell(self.di_ratio),
            format_cell(self.mcc),
            format_cell(Some(self.precision)),
            format_cell(Some(self.recall)),
            format_cell(Some(self.f1)),
            format_cell(Some(self.accuracy)),
        ]
    }
}

/// `c1 * mcc_loss + c2 * di_loss`, or `None` if either loss is undefined.
pub fn combined_loss(r: &MetricReport, w: &LossWeights) -> Option<f64> {
    Some(w.combine(r.mcc_loss?, r.di_loss?))
}

pub fn format_cell(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.prec$}", prec = TABLE_PRECISION),
        _ => "NaN".to_string(),
    }
}

/// Inverse of [`format_cell`].
pub fn parse_cell(s: &str) -> Result<Option<f64>, std::num::ParseFloatError> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("nan") {
        Ok(None)
    } else {
        s.parse().map(Some)
    }
}
