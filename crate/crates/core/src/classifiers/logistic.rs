use ndarray::{Array1, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::{sigmoid, ClassifierError, Scorer};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogisticSolver {
    /// Damped Newton steps on the penalized log loss.
    #[default]
    Newton,
    /// Fixed-step full-batch gradient descent.
    GradientDescent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticParams {
    pub solver: LogisticSolver,
    /// Step size of the gradient-descent solver.
    pub learning_rate: f64,
    pub weight_decay: f64,
    /// Iteration cap for either solver.
    pub iterations: usize,
    /// Stop once every gradient component is below this.
    pub tolerance: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self {
            solver: LogisticSolver::Newton,
            learning_rate: 0.1,
            weight_decay: 1e-4,
            iterations: 300,
            tolerance: 1e-8,
        }
    }
}

impl LogisticParams {
    pub fn validate(&self) -> Result<(), ClassifierError> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(ClassifierError::InvalidHyperparameter("learning_rate must be > 0".into()));
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return Err(ClassifierError::InvalidHyperparameter("weight_decay must be >= 0".into()));
        }
        if !(self.tolerance >= 0.0) {
            return Err(ClassifierError::InvalidHyperparameter("tolerance must be >= 0".into()));
        }
        if self.iterations == 0 {
            return Err(ClassifierError::InvalidHyperparameter("iterations must be >= 1".into()));
        }
        Ok(())
    }
}

/// Logistic regression trained by full-batch gradient descent.
#[derive(Clone, Debug, PartialEq)]
pub struct LogisticModel {
    pub weights: Array1<f64>,
    pub bias: f64,
}

impl LogisticModel {
    pub fn fit(x: ArrayView2<'_, f64>, y: &[bool], p: &LogisticParams) -> Self {
        let x = x.as_standard_layout();
        let data = x.as_slice().expect("standard layout is contiguous");
        let d = x.ncols();
        let (w, b) = match p.solver {
            LogisticSolver::GradientDescent => descend(data, d, y, p),
            LogisticSolver::Newton => newton(data, d, y, p),
        };
        Self {
            weights: Array1::from(w),
            bias: b,
        }
    }

    pub fn margin(&self, row: ArrayView1<'_, f64>) -> f64 {
        row.dot(&self.weights) + self.bias
    }
}

impl Scorer for LogisticModel {
    fn score(&self, x: ArrayView2<'_, f64>) -> Vec<f64> {
        x.rows().into_iter().map(|r| sigmoid(self.margin(r))).collect()
    }
}

fn descend(x: &[f64], d: usize, y: &[bool], p: &LogisticParams) -> (Vec<f64>, f64) {
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut gw = vec![0.0; d];
    for _ in 0..p.iterations {
        let gb = gradient_into(x, d, y, &w, b, p.weight_decay, &mut gw);
        if converged(&gw, gb, p.tolerance) {
            break;
        }
        for (wj, gj) in w.iter_mut().zip(&gw) {
            *wj -= p.learning_rate * gj;
        }
        b -= p.learning_rate * gb;
    }
    (w, b)
}

fn converged(gw: &[f64], gb: f64, tol: f64) -> bool {
    gb.abs() < tol && gw.iter().all(|g| g.abs() < tol)
}

/// Newton's method with backtracking; the objective never increases.
fn newton(x: &[f64], d: usize, y: &[bool], p: &LogisticParams) -> (Vec<f64>, f64) {
    let n = y.len() as f64;
    let m = d + 1;
    // Parameters are `[w.., b]`.
    let mut theta = vec![0.0; m];
    let mut gw = vec![0.0; d];
    let mut hess = vec![0.0; m * m];
    let mut f = objective_slice(x, d, y, &theta[..d], theta[d], p.weight_decay);
    for _ in 0..p.iterations {
        let gb = gradient_into(x, d, y, &theta[..d], theta[d], p.weight_decay, &mut gw);
        if converged(&gw, gb, p.tolerance) {
            break;
        }
        hess.fill(0.0);
        for row in x.chunks_exact(d) {
            let z = row.iter().zip(&theta[..d]).map(|(a, c)| a * c).sum::<f64>() + theta[d];
            let s = sigmoid(z);
            let v = s * (1.0 - s) / n;
            for i in 0..m {
                let xi = if i < d { row[i] } else { 1.0 };
                for j in 0..=i {
                    let xj = if j < d { row[j] } else { 1.0 };
                    hess[i * m + j] += v * xi * xj;
                }
            }
        }
        for i in 0..m {
            for j in 0..i {
                hess[j * m + i] = hess[i * m + j];
            }
            // The bias is unpenalized; a tiny ridge keeps the system solvable.
            hess[i * m + i] += if i < d { p.weight_decay } else { 0.0 } + 1e-12;
        }
        let mut step: Vec<f64> = gw.iter().copied().chain(std::iter::once(gb)).collect();
        if !solve_in_place(&mut hess, &mut step, m) {
            break;
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let cand: Vec<f64> = theta.iter().zip(&step).map(|(a, s)| a - t * s).collect();
            let fc = objective_slice(x, d, y, &cand[..d], cand[d], p.weight_decay);
            if fc <= f {
                theta = cand;
                f = fc;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let b = theta.pop().expect("bias entry");
    (theta, b)
}

/// Gaussian elimination with partial pivoting on a row-major `m x m`
/// system; the solution replaces `rhs`. False if singular.
fn solve_in_place(a: &mut [f64], rhs: &mut [f64], m: usize) -> bool {
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&i, &j| a[i * m + col].abs().total_cmp(&a[j * m + col].abs()))
            .expect("non-empty range");
        if a[pivot * m + col].abs() < 1e-300 {
            return false;
        }
        if pivot != col {
            for k in 0..m {
                a.swap(pivot * m + k, col * m + k);
            }
            rhs.swap(pivot, col);
        }
        for r in col + 1..m {
            let factor = a[r * m + col] / a[col * m + col];
            if factor != 0.0 {
                for k in col..m {
                    a[r * m + k] -= factor * a[col * m + k];
                }
                rhs[r] -= factor * rhs[col];
            }
        }
    }
    for col in (0..m).rev() {
        let tail: f64 = (col + 1..m).map(|k| a[col * m + k] * rhs[k]).sum();
        rhs[col] = (rhs[col] - tail) / a[col * m + col];
    }
    rhs.iter().all(|v| v.is_finite())
}

fn log1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Mean log loss plus `decay / 2 * |w|^2`. The bias is not penalized.
pub fn objective(x: ArrayView2<'_, f64>, y: &[bool], w: ArrayView1<'_, f64>, b: f64, decay: f64) -> f64 {
    let x = x.as_standard_layout();
    objective_slice(x.as_slice().expect("contiguous"), x.ncols(), y, &w.to_vec(), b, decay)
}

fn objective_slice(x: &[f64], d: usize, y: &[bool], w: &[f64], b: f64, decay: f64) -> f64 {
    let n = y.len() as f64;
    let loss: f64 = x
        .chunks_exact(d)
        .zip(y)
        .map(|(row, &t)| {
            let z = row.iter().zip(w).map(|(a, c)| a * c).sum::<f64>() + b;
            // -log sigmoid(z) for positives, -log(1 - sigmoid(z)) for negatives.
            if t {
                log1p_exp(-z)
            } else {
                log1p_exp(z)
            }
        })
        .sum();
    loss / n + 0.5 * decay * w.iter().map(|v| v * v).sum::<f64>()
}

pub fn gradient(
    x: ArrayView2<'_, f64>,
    y: &[bool],
    w: ArrayView1<'_, f64>,
    b: f64,
    decay: f64,
) -> (Array1<f64>, f64) {
    let x = x.as_standard_layout();
    let w = w.to_vec();
    let mut gw = vec![0.0; w.len()];
    let gb = gradient_into(x.as_slice().expect("contiguous"), w.len(), y, &w, b, decay, &mut gw);
    (Array1::from(gw), gb)
}

/// Writes the weight gradient into `gw` and returns the bias gradient.
/// `x` is row-major with `d` columns.
fn gradient_into(x: &[f64], d: usize, y: &[bool], w: &[f64], b: f64, decay: f64, gw: &mut [f64]) -> f64 {
    let n = y.len() as f64;
    gw.fill(0.0);
    let mut gb = 0.0;
    for (row, &t) in x.chunks_exact(d).zip(y) {
        let z = row.iter().zip(w).map(|(a, c)| a * c).sum::<f64>() + b;
        let r = sigmoid(z) - f64::from(u8::from(t));
        for (g, a) in gw.iter_mut().zip(row) {
            *g += r * a;
        }
        gb += r;
    }
    for (g, wj) in gw.iter_mut().zip(w) {
        *g = *g / n + decay * wj;
    }
    gb / n
}

#[cfg(test)]
mod tests {
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn random_problem(seed: u64) -> (Array2<f64>, Vec<bool>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Array2::from_shape_fn((30, 4), |_| rng.gen_range(-2.0..2.0));
        let y = (0..30).map(|_| rng.gen_bool(0.4)).collect();
        (x, y)
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for seed in 0..5 {
            let (x, y) = random_problem(seed);
            let w = Array1::from_shape_fn(4, |_| rng.gen_range(-1.0..1.0));
            let b = rng.gen_range(-1.0..1.0);
            let decay = 0.05;
            let (gw, gb) = gradient(x.view(), &y, w.view(), b, decay);
            let h = 1e-6;
            for j in 0..4 {
                let mut wp = w.clone();
                let mut wm = w.clone();
                wp[j] += h;
                wm[j] -= h;
                let fd = (objective(x.view(), &y, wp.view(), b, decay) - objective(x.view(), &y, wm.view(), b, decay)) / (2.0 * h);
                assert!((fd - gw[j]).abs() <= 1e-5 * fd.abs().max(1e-3), "w{j}: {fd} vs {}", gw[j]);
            }
            let fd = (objective(x.view(), &y, w.view(), b + h, decay) - objective(x.view(), &y, w.view(), b - h, decay)) / (2.0 * h);
            assert!((fd - gb).abs() <= 1e-5 * fd.abs().max(1e-3));
        }
    }

    #[test]
    fn scores_are_logistic_of_linear_form() {
        let (x, y) = random_problem(3);
        let m = LogisticModel::fit(x.view(), &y, &LogisticParams::default());
        let scores = m.score(x.view());
        for (i, s) in scores.iter().enumerate() {
            let z: f64 = (0..4).map(|j| x[[i, j]] * m.weights[j]).sum::<f64>() + m.bias;
            assert!((s - 1.0 / (1.0 + (-z).exp())).abs() < 1e-12);
        }
    }

    #[test]
    fn descent_lowers_objective() {
        let (x, y) = random_problem(4);
        let p = LogisticParams::default();
        let m = LogisticModel::fit(x.view(), &y, &p);
        let start = objective(x.view(), &y, Array1::zeros(4).view(), 0.0, p.weight_decay);
        assert!(objective(x.view(), &y, m.weights.view(), m.bias, p.weight_decay) < start);
    }

    #[test]
    fn newton_reaches_a_stationary_point() {
        for seed in 0..4 {
            let (x, y) = random_problem(seed);
            let p = LogisticParams::default();
            let m = LogisticModel::fit(x.view(), &y, &p);
            let (gw, gb) = gradient(x.view(), &y, m.weights.view(), m.bias, p.weight_decay);
            assert!(gb.abs() < 1e-7 && gw.iter().all(|g| g.abs() < 1e-7), "{gw:?} {gb}");
        }
    }

    #[test]
    fn solvers_agree_at_convergence() {
        let (x, y) = random_problem(8);
        let newton = LogisticModel::fit(x.view(), &y, &LogisticParams::default());
        let gd = LogisticParams {
            solver: LogisticSolver::GradientDescent,
            learning_rate: 0.5,
            iterations: 20_000,
            ..Default::default()
        };
        let gd = LogisticModel::fit(x.view(), &y, &gd);
        for (a, b) in newton.weights.iter().zip(&gd.weights) {
            assert!((a - b).abs() < 1e-4, "{a} vs {b}");
        }
    }

    #[test]
    fn elimination_solves_small_system() {
        let mut a = vec![0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0];
        let mut rhs = vec![5.0, 3.0, 7.0];
        assert!(solve_in_place(&mut a, &mut rhs, 3));
        // Solution of the system built from x = (1, 2, 1)... verified by substitution.
        let orig = [0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0];
        for r in 0..3 {
            let lhs: f64 = (0..3).map(|k| orig[r * 3 + k] * rhs[k]).sum();
            assert!((lhs - [5.0, 3.0, 7.0][r]).abs() < 1e-12);
        }
    }

    #[test]
    fn validation() {
        let bad = LogisticParams {
            learning_rate: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert!(LogisticParams::default().validate().is_ok());
    }
}
