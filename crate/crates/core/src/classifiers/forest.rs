use ndarray::ArrayView2;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ClassifierError, Scorer};
use crate::par::{self, Execution};
use crate::seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub trees: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    /// Features tried per split; `None` means `ceil(sqrt(d))`.
    pub max_features: Option<usize>,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            trees: 100,
            max_depth: 12,
            min_samples_split: 2,
            max_features: None,
            execution: Execution::default(),
        }
    }
}

impl ForestParams {
    pub fn validate(&self) -> Result<(), ClassifierError> {
        let bad = |m: &str| Err(ClassifierError::InvalidHyperparameter(m.into()));
        if self.trees == 0 {
            return bad("trees must be >= 1");
        }
        if self.max_depth == 0 {
            return bad("max_depth must be >= 1");
        }
        if self.min_samples_split < 2 {
            return bad("min_samples_split must be >= 2");
        }
        if self.max_features == Some(0) {
            return bad("max_features must be >= 1");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Leaf(bool),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn predict(&self, row: ndarray::ArrayView1<'_, f64>) -> bool {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf(v) => return v,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if row[feature] <= threshold { left } else { right },
            }
        }
    }
}

/// Bagged Gini trees. Score is the fraction of trees voting unfavourable.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomForest {
    trees: Vec<Tree>,
}

struct Builder<'a, 'x> {
    x: ArrayView2<'x, f64>,
    y: &'a [bool],
    p: &'a ForestParams,
    mtry: usize,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

fn gini(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let q = pos as f64 / n as f64;
    2.0 * q * (1.0 - q)
}

impl Builder<'_, '_> {
    fn majority(&self, rows: &[usize]) -> bool {
        let pos = rows.iter().filter(|&&i| self.y[i]).count();
        2 * pos > rows.len()
    }

    /// Best (weighted impurity, feature, threshold) over a random feature subset.
    fn best_split(&mut self, rows: &[usize]) -> Option<(usize, f64)> {
        let d = self.x.ncols();
        let features = index::sample(&mut self.rng, d, self.mtry.min(d)).into_vec();
        let n = rows.len();
        let total_pos = rows.iter().filter(|&&i| self.y[i]).count();
        let parent = gini(total_pos, n);
        let mut best: Option<(f64, usize, f64)> = None;
        let mut order: Vec<(f64, bool)> = Vec::with_capacity(n);
        for f in features {
            order.clear();
            order.extend(rows.iter().map(|&i| (self.x[[i, f]], self.y[i])));
            order.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left_pos = 0;
            for k in 1..n {
                left_pos += usize::from(order[k - 1].1);
                if order[k].0 <= order[k - 1].0 {
                    continue;
                }
                let w = (k as f64 * gini(left_pos, k) + (n - k) as f64 * gini(total_pos - left_pos, n - k)) / n as f64;
                if w < parent - 1e-12 && best.is_none_or(|b| w < b.0) {
                    best = Some((w, f, 0.5 * (order[k - 1].0 + order[k].0)));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf(false));
        let pos = rows.iter().filter(|&&i| self.y[i]).count();
        let pure = pos == 0 || pos == rows.len();
        let split = if pure || depth >= self.p.max_depth || rows.len() < self.p.min_samples_split {
            None
        } else {
            self.best_split(&rows)
        };
        match split {
            None => self.nodes[id] = Node::Leaf(self.majority(&rows)),
            Some((feature, threshold)) => {
                let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| self.x[[i, feature]] <= threshold);
                let left = self.grow(l, depth + 1);
                let right = self.grow(r, depth + 1);
                self.nodes[id] = Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                };
            }
        }
        id
    }
}

impl RandomForest {
    pub fn fit(x: ArrayView2<'_, f64>, y: &[bool], p: &ForestParams, seed: u64) -> Self {
        let d = x.ncols().max(1);
        let mtry = p.max_features.unwrap_or_else(|| (d as f64).sqrt().ceil() as usize);
        let n = x.nrows();
        let trees = par::map_range(p.execution, p.trees, |t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(seed, &[t as u64]));
            let rows: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            let mut b = Builder {
                x,
                y,
                p,
                mtry,
                rng,
                nodes: Vec::new(),
            };
            b.grow(rows, 0);
            Tree { nodes: b.nodes }
        });
        Self { trees }
    }

    pub fn tree_count(&self) -> usize {
        self.trees.len()
    }
}

impl Scorer for RandomForest {
    fn score(&self, x: ArrayView2<'_, f64>) -> Vec<f64> {
        let t = self.trees.len() as f64;
        x.rows()
            .into_iter()
            .map(|r| self.trees.iter().filter(|tree| tree.predict(r)).count() as f64 / t)
            .collect()
    }
}
