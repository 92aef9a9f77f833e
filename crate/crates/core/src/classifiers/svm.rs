use ndarray::{Array1, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::{sigmoid, ClassifierError, Scorer};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmParams {
    pub learning_rate: f64,
    pub regularization: f64,
    pub iterations: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            regularization: 1e-3,
            iterations: 300,
        }
    }
}

impl SvmParams {
    pub fn validate(&self) -> Result<(), ClassifierError> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(ClassifierError::InvalidHyperparameter("learning_rate must be > 0".into()));
        }
        if !(self.regularization >= 0.0 && self.regularization.is_finite()) {
            return Err(ClassifierError::InvalidHyperparameter("regularization must be >= 0".into()));
        }
        if self.iterations == 0 {
            return Err(ClassifierError::InvalidHyperparameter("iterations must be >= 1".into()));
        }
        Ok(())
    }
}

/// Linear SVM trained by full-batch sub-gradient descent on the hinge loss.
/// Scores are the logistic of the margin.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSvm {
    pub weights: Array1<f64>,
    pub bias: f64,
}

impl LinearSvm {
    pub fn fit(x: ArrayView2<'_, f64>, y: &[bool], p: &SvmParams) -> Self {
        let x = x.as_standard_layout();
        let data = x.as_slice().expect("standard layout is contiguous");
        let d = x.ncols();
        let mut w = vec![0.0; d];
        let mut b = 0.0;
        let mut gw = vec![0.0; d];
        for _ in 0..p.iterations {
            let gb = subgradient_into(data, d, y, &w, b, p.regularization, &mut gw);
            for (wj, gj) in w.iter_mut().zip(&gw) {
                *wj -= p.learning_rate * gj;
            }
            b -= p.learning_rate * gb;
        }
        Self {
            weights: Array1::from(w),
            bias: b,
        }
    }
}

impl Scorer for LinearSvm {
    fn score(&self, x: ArrayView2<'_, f64>) -> Vec<f64> {
        x.rows()
            .into_iter()
            .map(|r| sigmoid(r.dot(&self.weights) + self.bias))
            .collect()
    }
}

fn sign(t: bool) -> f64 {
    if t {
        1.0
    } else {
        -1.0
    }
}

/// Mean hinge loss plus `lambda / 2 * |w|^2`.
pub fn objective(x: ArrayView2<'_, f64>, y: &[bool], w: ArrayView1<'_, f64>, b: f64, lambda: f64) -> f64 {
    let n = x.nrows() as f64;
    let hinge: f64 = x
        .rows()
        .into_iter()
        .zip(y)
        .map(|(r, &t)| (1.0 - sign(t) * (r.dot(&w) + b)).max(0.0))
        .sum();
    hinge / n + 0.5 * lambda * w.dot(&w)
}

/// Gradient wherever no margin equals exactly 1; a valid sub-gradient elsewhere.
pub fn subgradient(
    x: ArrayView2<'_, f64>,
    y: &[bool],
    w: ArrayView1<'_, f64>,
    b: f64,
    lambda: f64,
) -> (Array1<f64>, f64) {
    let x = x.as_standard_layout();
    let w = w.to_vec();
    let mut gw = vec![0.0; w.len()];
    let gb = subgradient_into(x.as_slice().expect("contiguous"), w.len(), y, &w, b, lambda, &mut gw);
    (Array1::from(gw), gb)
}

fn subgradient_into(x: &[f64], d: usize, y: &[bool], w: &[f64], b: f64, lambda: f64, gw: &mut [f64]) -> f64 {
    let n = y.len() as f64;
    gw.fill(0.0);
    let mut gb = 0.0;
    for (row, &t) in x.chunks_exact(d).zip(y) {
        let s = sign(t);
        let z = row.iter().zip(w).map(|(a, c)| a * c).sum::<f64>() + b;
        if s * z < 1.0 {
            for (g, a) in gw.iter_mut().zip(row) {
                *g -= s * a;
            }
            gb -= s;
        }
    }
    for (g, wj) in gw.iter_mut().zip(w) {
        *g = *g / n + lambda * wj;
    }
    gb / n
}
