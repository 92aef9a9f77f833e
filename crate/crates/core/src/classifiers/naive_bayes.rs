use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use super::{ClassifierError, Scorer};
use crate::dataset::FeatureLayout;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NaiveBayesParams {
    /// Added to every Gaussian variance, relative to the largest feature variance.
    pub var_smoothing: f64,
}

impl Default for NaiveBayesParams {
    fn default() -> Self {
        Self { var_smoothing: 1e-9 }
    }
}

impl NaiveBayesParams {
    pub fn validate(&self) -> Result<(), ClassifierError> {
        if self.var_smoothing >= 0.0 && self.var_smoothing.is_finite() {
            Ok(())
        } else {
            Err(ClassifierError::InvalidHyperparameter("var_smoothing must be >= 0".into()))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct ClassModel {
    log_prior: f64,
    means: Vec<f64>,
    vars: Vec<f64>,
    /// Per one-hot block: log P(category | class), add-one smoothed.
    log_cat: Vec<Vec<f64>>,
}

/// Gaussian likelihood on numeric columns, smoothed categorical likelihood
/// on one-hot blocks. Index 0 is favourable, index 1 unfavourable.
#[derive(Clone, Debug, PartialEq)]
pub struct NaiveBayes {
    layout: FeatureLayout,
    classes: [ClassModel; 2],
}

const VAR_FLOOR: f64 = 1e-12;

impl NaiveBayes {
    pub fn fit(x: ArrayView2<'_, f64>, y: &[bool], layout: &FeatureLayout, p: &NaiveBayesParams) -> Self {
        let n = x.nrows() as f64;
        let max_var = (0..layout.numeric)
            .map(|j| {
                let col = x.column(j);
                let m = col.mean().unwrap_or(0.0);
                col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n
            })
            .fold(0.0, f64::max);
        let eps = (p.var_smoothing * max_var).max(VAR_FLOOR);
        let fit_class = |label: bool| {
            let rows: Vec<usize> = (0..x.nrows()).filter(|&i| y[i] == label).collect();
            let nc = rows.len() as f64;
            let mut means = vec![0.0; layout.numeric];
            let mut vars = vec![0.0; layout.numeric];
            for j in 0..layout.numeric {
                let m = rows.iter().map(|&i| x[[i, j]]).sum::<f64>() / nc;
                means[j] = m;
                vars[j] = rows.iter().map(|&i| (x[[i, j]] - m).powi(2)).sum::<f64>() / nc + eps;
            }
            let log_cat = layout
                .blocks
                .iter()
                .map(|block| {
                    let k = block.len() as f64;
                    block
                        .clone()
                        .map(|c| {
                            let hits = rows.iter().filter(|&&i| x[[i, c]] > 0.5).count() as f64;
                            ((hits + 1.0) / (nc + k)).ln()
                        })
                        .collect()
                })
                .collect();
            ClassModel {
                log_prior: (nc / n).ln(),
                means,
                vars,
                log_cat,
            }
        };
        Self {
            layout: layout.clone(),
            classes: [fit_class(false), fit_class(true)],
        }
    }

    fn log_joint(&self, c: &ClassModel, row: ndarray::ArrayView1<'_, f64>) -> f64 {
        let mut lp = c.log_prior;
        for j in 0..self.layout.numeric {
            let v = c.vars[j];
            lp -= 0.5 * ((2.0 * std::f64::consts::PI * v).ln() + (row[j] - c.means[j]).powi(2) / v);
        }
        for (block, logs) in self.layout.blocks.iter().zip(&c.log_cat) {
            // An all-zero block is an unseen category and contributes nothing.
            if let Some(k) = block.clone().position(|col| row[col] > 0.5) {
                lp += logs[k];
            }
        }
        lp
    }
}

impl Scorer for NaiveBayes {
    fn score(&self, x: ArrayView2<'_, f64>) -> Vec<f64> {
        x.rows()
            .into_iter()
            .map(|r| {
                let l0 = self.log_joint(&self.classes[0], r);
                let l1 = self.log_joint(&self.classes[1], r);
                super::sigmoid(l1 - l0)
            })
            .collect()
    }
}
