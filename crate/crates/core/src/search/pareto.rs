use serde::{Deserialize, Serialize};

use super::{EvaluationPoint, SearchError};
use crate::metrics::LossWeights;

/// Valid points not strictly dominated in `(mcc_loss, di_loss)`, ascending
/// by `mcc_loss`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ParetoFront {
    pub points: Vec<EvaluationPoint>,
}

impl ParetoFront {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &EvaluationPoint) -> bool {
        self.points.iter().any(|q| q == p)
    }
}

/// Among points with identical coordinates only the first in tie order
/// survives.
pub fn pareto_front(points: &[EvaluationPoint]) -> ParetoFront {
    let mut valid: Vec<(f64, f64, &EvaluationPoint)> = points
        .iter()
        .filter_map(|p| p.losses().filter(|_| p.is_valid()).map(|(m, d)| (m, d, p)))
        .collect();
    valid.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then_with(|| a.2.tie_order(b.2))
    });
    let mut front = Vec::new();
    let mut best_di = f64::INFINITY;
    // After the sort every earlier point has mcc_loss <= the current one, so
    // the current point survives iff its di_loss beats all of them.
    for (_, d, p) in valid {
        if d < best_di {
            best_di = d;
            front.push(p.clone());
        }
    }
    ParetoFront { points: front }
}

/// Minimum combined loss under `weights`; ties by `(alpha, beta, gamma,
/// threshold)`.
pub fn select_optimal<'a>(front: &'a ParetoFront, weights: &LossWeights) -> Result<&'a EvaluationPoint, SearchError> {
    front
        .points
        .iter()
        .map(|p| {
            let (m, d) = p.losses().expect("front members are valid");
            (weights.combine(m, d), p)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.tie_order(b.1)))
        .map(|(_, p)| p)
        .ok_or(SearchError::EmptyFront)
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;
    use crate::metrics::{basic_metrics, ConfusionCounts, MetricReport};
    use crate::search::key_params;

    pub fn point(i: u32, mcc_loss: f64, di_loss: f64) -> EvaluationPoint {
        let w = LossWeights::default();
        let mut r = MetricReport::from_parts(Some(1.0), Some(1.0), basic_metrics(&ConfusionCounts::new(1, 1, 0, 0)), &w);
        r.mcc_loss = Some(mcc_loss);
        r.di_loss = Some(di_loss);
        r.combined_loss = Some(w.combine(mcc_loss, di_loss));
        let key = [i / 10_000, (i / 100) % 100, i % 100];
        EvaluationPoint {
            params: key_params(key),
            key,
            threshold: 0.5,
            threshold_key: 50,
            classifier: "t".into(),
            level: 0,
            report: Some(r),
            failure: None,
            sample_size: 1,
            seed: 0,
        }
    }

    /// Members not strictly dominated by any valid point, keeping the
    /// first of exact duplicates in tie order.
    pub fn brute_force(points: &[EvaluationPoint]) -> Vec<EvaluationPoint> {
        let valid: Vec<&EvaluationPoint> = points.iter().filter(|p| p.is_valid()).collect();
        let mut out: Vec<EvaluationPoint> = valid
            .iter()
            .filter(|p| {
                let (pm, pd) = p.losses().unwrap();
                !valid.iter().any(|q| {
                    let (qm, qd) = q.losses().unwrap();
                    let dominates = qm <= pm && qd <= pd && (qm < pm || qd < pd);
                    let earlier_twin = qm == pm && qd == pd && q.tie_order(p).is_lt();
                    dominates || earlier_twin
                })
            })
            .map(|p| (*p).clone())
            .collect();
        out.sort_by(|a, b| a.losses().unwrap().0.total_cmp(&b.losses().unwrap().0));
        out
    }
}
