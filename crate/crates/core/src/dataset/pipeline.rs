use std::collections::BTreeMap;
use std::ops::Range;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::Dataset;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PipelineError {
    #[error("feature pipeline used before fit")]
    NotFitted,
    #[error("record layout mismatch: expected {expected_numeric} numeric and {expected_categorical} categorical features")]
    WidthMismatch {
        expected_numeric: usize,
        expected_categorical: usize,
    },
}

/// Column layout of a transformed matrix: standardized numeric columns first,
/// then one one-hot block per categorical column.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureLayout {
    pub numeric: usize,
    pub blocks: Vec<Range<usize>>,
}

impl FeatureLayout {
    pub fn width(&self) -> usize {
        self.blocks.last().map_or(self.numeric, |b| b.end)
    }
}

/// One-hot encoder plus standard scaler, fit on a single dataset.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FeaturePipeline {
    means: Vec<f64>,
    stds: Vec<f64>,
    /// Per categorical column: category -> offset inside its block.
    vocab: Vec<BTreeMap<String, usize>>,
    fitted: bool,
}

impl FeaturePipeline {
    pub fn new() -> Self {
        Self::default()
    }

    /// Shorthand for `new` followed by `fit`.
    pub fn fitted_on(d: &Dataset) -> Self {
        let mut p = Self::new();
        p.fit(d);
        p
    }

    pub fn is_fitted(&self) -> bool {
        self.fitted
    }

    /// Learns category vocabularies and per-column mean and population
    /// standard deviation. Constant columns get sd 1.
    pub fn fit(&mut self, d: &Dataset) {
        let n_num = d.schema().numeric_features().count();
        let n_cat = d.schema().categorical_features().count();
        let n = d.len() as f64;

        let mut means = vec![0.0; n_num];
        for r in d.records() {
            for (m, v) in means.iter_mut().zip(&r.numeric) {
                *m += v;
            }
        }
        if n > 0.0 {
            means.iter_mut().for_each(|m| *m /= n);
        }
        let mut vars = vec![0.0; n_num];
        for r in d.records() {
            for ((s, v), m) in vars.iter_mut().zip(&r.numeric).zip(&means) {
                *s += (v - m) * (v - m);
            }
        }
        let stds = vars
            .into_iter()
            .map(|s| {
                let sd = if n > 0.0 { (s / n).sqrt() } else { 0.0 };
                if sd > 1e-12 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();

        let mut vocab: Vec<BTreeMap<String, usize>> = vec![BTreeMap::new(); n_cat];
        for r in d.records() {
            for (v, c) in vocab.iter_mut().zip(&r.categorical) {
                v.entry(c.clone()).or_insert(0);
            }
        }
        for v in vocab.iter_mut() {
            for (i, slot) in v.values_mut().enumerate() {
                *slot = i;
            }
        }

        self.means = means;
        self.stds = stds;
        self.vocab = vocab;
        self.fitted = true;
    }

    pub fn layout(&self) -> Result<FeatureLayout, PipelineError> {
        if !self.fitted {
            return Err(PipelineError::NotFitted);
        }
        let mut start = self.means.len();
        let blocks = self
            .vocab
            .iter()
            .map(|v| {
                let b = start..start + v.len();
                start = b.end;
                b
            })
            .collect();
        Ok(FeatureLayout {
            numeric: self.means.len(),
            blocks,
        })
    }

    /// Encodes `d` into a dense row-major matrix. Unseen categories encode as
    /// an all-zero block.
    pub fn transform(&self, d: &Dataset) -> Result<Array2<f64>, PipelineError> {
        let layout = self.layout()?;
        let n_num = layout.numeric;
        let mut out = Array2::zeros((d.len(), layout.width()));
        for (mut row, r) in out.rows_mut().into_iter().zip(d.records()) {
            if r.numeric.len() != n_num || r.categorical.len() != self.vocab.len() {
                return Err(PipelineError::WidthMismatch {
                    expected_numeric: n_num,
                    expected_categorical: self.vocab.len(),
                });
            }
            for j in 0..n_num {
                row[j] = (r.numeric[j] - self.means[j]) / self.stds[j];
            }
            for ((cat, vocab), block) in r.categorical.iter().zip(&self.vocab).zip(&layout.blocks) {
                if let Some(&k) = vocab.get(cat) {
                    row[block.start + k] = 1.0;
                }
            }
        }
        Ok(out)
    }
}
