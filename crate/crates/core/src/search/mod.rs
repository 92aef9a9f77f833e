//! Model inspection, the two-level grid search over `(alpha, beta, gamma,
//! threshold)`, and Pareto-front selection.
//!
//! Lattice coordinates are integer keys in hundredths so that points from
//! both levels compare and deduplicate exactly.

mod grid;
mod inspect;
mod io;
mod pareto;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::balance::{BalanceError, BalanceParams};
use crate::metrics::{LossWeights, MetricReport};
use crate::par::Execution;

pub use grid::{
    grid_search_level0, grid_search_level1, level0_keys, level1_neighbourhood, run_search, SearchOutcome,
};
pub use inspect::{inspect, point_seed, train_point, ModelInspector, PointEvaluator};
pub use io::{read_jsonl, write_front_csv, write_jsonl};
pub use pareto::{pareto_front, select_optimal, ParetoFront};

/// Lattice keys are multiples of `1 / KEY_SCALE`.
pub const KEY_SCALE: u32 = 100;

#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("no valid level-0 point to refine")]
    NoValidPoints,
    #[error("Pareto front is empty")]
    EmptyFront,
    #[error(transparent)]
    Balance(#[from] BalanceError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// A point on the `(alpha, beta, gamma)` lattice in hundredths.
pub type LatticeKey = [u32; 3];

pub fn key_value(k: u32) -> f64 {
    f64::from(k) / f64::from(KEY_SCALE)
}

pub fn key_params(key: LatticeKey) -> BalanceParams {
    BalanceParams {
        alpha: key_value(key[0]),
        beta: key_value(key[1]),
        gamma: key_value(key[2]),
    }
}

fn step_key(step: f64, what: &str) -> Result<u32, SearchError> {
    let k = (step * f64::from(KEY_SCALE)).round();
    if !(step > 0.0) || (k - step * f64::from(KEY_SCALE)).abs() > 1e-9 || k < 1.0 || !KEY_SCALE.is_multiple_of(k as u32) {
        return Err(SearchError::InvalidGrid(format!(
            "{what} {step} must be a multiple of 0.01 dividing 1"
        )));
    }
    Ok(k as u32)
}

/// Grid search configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub level0_step: f64,
    pub level1_step: f64,
    pub top_k: usize,
    /// Level-1 box half-width around each refined point.
    pub half_width: f64,
    /// Level-0 thresholds.
    pub thresholds: Vec<f64>,
    /// Level-1 thresholds cover `best +/- threshold_half_width` at this step.
    pub threshold_step: f64,
    pub threshold_half_width: f64,
    pub weights: LossWeights,
    /// Evaluations per point, averaged. Only stochastic plug-ins need more than one.
    pub repeats: usize,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            level0_step: 0.1,
            level1_step: 0.01,
            top_k: 5,
            half_width: 0.1,
            thresholds: (1..=9).map(|i| f64::from(i) / 10.0).collect(),
            threshold_step: 0.01,
            threshold_half_width: 0.1,
            weights: LossWeights::default(),
            repeats: 1,
            execution: Execution::default(),
        }
    }
}

/// [`GridSpec`] converted to integer keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct GridKeys {
    pub level0_step: u32,
    pub level1_step: u32,
    pub half_width: u32,
    pub thresholds: Vec<u32>,
    pub threshold_step: u32,
    pub threshold_half_width: u32,
}

impl GridSpec {
    pub(crate) fn keys(&self) -> Result<GridKeys, SearchError> {
        if self.top_k == 0 {
            return Err(SearchError::InvalidGrid("top_k must be >= 1".into()));
        }
        if self.repeats == 0 {
            return Err(SearchError::InvalidGrid("repeats must be >= 1".into()));
        }
        self.weights
            .validate()
            .map_err(|e| SearchError::InvalidGrid(e.to_string()))?;
        let level1_step = step_key(self.level1_step, "level1_step")?;
        let threshold_step = step_key(self.threshold_step, "threshold_step")?;
        let half = |v: f64, what: &str| -> Result<u32, SearchError> {
            let k = (v * f64::from(KEY_SCALE)).round();
            if !(v >= 0.0) || (k - v * f64::from(KEY_SCALE)).abs() > 1e-9 {
                return Err(SearchError::InvalidGrid(format!("{what} {v} must be a multiple of 0.01")));
            }
            Ok(k as u32)
        };
        let thresholds = self
            .thresholds
            .iter()
            .map(|&t| {
                let k = half(t, "threshold")?;
                if k == 0 || k >= KEY_SCALE {
                    return Err(SearchError::InvalidGrid(format!("threshold {t} outside (0, 1)")));
                }
                Ok(k)
            })
            .collect::<Result<Vec<_>, _>>()?;
        if thresholds.is_empty() {
            return Err(SearchError::InvalidGrid("no thresholds".into()));
        }
        Ok(GridKeys {
            level0_step: step_key(self.level0_step, "level0_step")?,
            level1_step,
            half_width: half(self.half_width, "half_width")?,
            thresholds,
            threshold_step,
            threshold_half_width: half(self.threshold_half_width, "threshold_half_width")?,
        })
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        self.keys().map(|_| ())
    }
}

/// One evaluated `(alpha, beta, gamma, threshold)` tuple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationPoint {
    pub params: BalanceParams,
    pub key: LatticeKey,
    pub threshold: f64,
    pub threshold_key: u32,
    pub classifier: String,
    pub level: u8,
    /// Metrics on the evaluation split; `None` if evaluation failed.
    pub report: Option<MetricReport>,
    pub failure: Option<String>,
    pub sample_size: usize,
    pub seed: u64,
}

impl EvaluationPoint {
    pub fn combined_loss(&self) -> Option<f64> {
        self.report.as_ref().and_then(|r| r.combined_loss)
    }

    pub fn losses(&self) -> Option<(f64, f64)> {
        let r = self.report.as_ref()?;
        Some((r.mcc_loss?, r.di_loss?))
    }

    pub fn is_valid(&self) -> bool {
        self.losses().is_some() && self.combined_loss().is_some()
    }

    /// Deterministic tie-break order: `(alpha, beta, gamma, threshold, level)`.
    pub fn tie_order(&self, other: &Self) -> Ordering {
        (self.key, self.threshold_key, self.level).cmp(&(other.key, other.threshold_key, other.level))
    }

    /// Ascending combined loss, invalid points last, ties by [`Self::tie_order`].
    pub fn rank_order(&self, other: &Self) -> Ordering {
        let loss = |p: &Self| p.combined_loss().unwrap_or(f64::INFINITY);
        loss(self).total_cmp(&loss(other)).then_with(|| self.tie_order(other))
    }
}

pub fn sort_by_rank(points: &mut [EvaluationPoint]) {
    points.sort_by(EvaluationPoint::rank_order);
}
