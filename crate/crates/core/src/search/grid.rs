use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::inspect::{average, make_point, point_seed, PointEvaluator};
use super::pareto::{pareto_front, select_optimal, ParetoFront};
use super::{key_value, sort_by_rank, EvaluationPoint, GridSpec, LatticeKey, SearchError, KEY_SCALE};
use crate::par;
use crate::seed;

/// Every point of the `{0, step, ..., 1}^3` lattice in lexicographic order.
pub fn level0_keys(step: u32) -> Vec<LatticeKey> {
    let axis: Vec<u32> = (0..=KEY_SCALE).step_by(step as usize).collect();
    let mut keys = Vec::with_capacity(axis.len().pow(3));
    for &a in &axis {
        for &b in &axis {
            for &g in &axis {
                keys.push([a, b, g]);
            }
        }
    }
    keys
}

fn clipped_axis(centre: u32, half: u32, step: u32, lo: u32, hi: u32) -> impl Iterator<Item = u32> {
    let start = centre.saturating_sub(half).max(lo);
    let end = (centre + half).min(hi);
    // Stay on the step lattice anchored at the centre.
    let start = start + (centre - start) % step;
    (start..=end).step_by(step as usize)
}

/// The level-1 box `[c - half, c + half]^3` clipped to `[0, 1]^3`.
pub fn level1_neighbourhood(centre: LatticeKey, half: u32, step: u32) -> Vec<LatticeKey> {
    let mut keys = Vec::new();
    for a in clipped_axis(centre[0], half, step, 0, KEY_SCALE) {
        for b in clipped_axis(centre[1], half, step, 0, KEY_SCALE) {
            for g in clipped_axis(centre[2], half, step, 0, KEY_SCALE) {
                keys.push([a, b, g]);
            }
        }
    }
    keys
}

/// Evaluates each lattice point at its thresholds and keeps the best
/// threshold per point. Output is in rank order.
fn evaluate_lattice(
    evaluator: &dyn PointEvaluator,
    tasks: &[(LatticeKey, Vec<u32>)],
    level: u8,
    grid: &GridSpec,
    global_seed: u64,
) -> Vec<EvaluationPoint> {
    let mut kept = par::map(grid.execution, tasks, |(key, tkeys)| {
        let seed = point_seed(global_seed, *key);
        let thresholds: Vec<f64> = tkeys.iter().map(|&t| key_value(t)).collect();
        let params = super::key_params(*key);
        let runs: Vec<Vec<_>> = (0..grid.repeats)
            .map(|r| {
                let s = if r == 0 { seed } else { seed::derive(seed, &[r as u64]) };
                evaluator.evaluate(params, &thresholds, s)
            })
            .collect();
        tkeys
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let reps = runs.iter().map(|run| run[i].clone()).collect();
                make_point(evaluator, *key, t, level, seed, average(reps, &grid.weights))
            })
            .min_by(EvaluationPoint::rank_order)
            .expect("at least one threshold per point")
    });
    sort_by_rank(&mut kept);
    let valid = kept.iter().filter(|p| p.is_valid()).count();
    if valid == 0 {
        log::warn!("level {level}: none of {} points produced defined losses", kept.len());
    }
    kept
}

/// Level 0: the coarse lattice times the coarse threshold grid.
pub fn grid_search_level0(
    evaluator: &dyn PointEvaluator,
    grid: &GridSpec,
    seed: u64,
) -> Result<Vec<EvaluationPoint>, SearchError> {
    let keys = grid.keys()?;
    let tasks: Vec<_> = level0_keys(keys.level0_step)
        .into_iter()
        .map(|k| (k, keys.thresholds.clone()))
        .collect();
    Ok(evaluate_lattice(evaluator, &tasks, 0, grid, seed))
}

/// Level 1: fine boxes around the `top_k` best valid level-0 points.
///
/// Overlapping boxes are merged; each lattice point is evaluated once over
/// the union of the thresholds its boxes request.
pub fn grid_search_level1(
    level0: &[EvaluationPoint],
    evaluator: &dyn PointEvaluator,
    grid: &GridSpec,
    seed: u64,
) -> Result<Vec<EvaluationPoint>, SearchError> {
    let keys = grid.keys()?;
    let mut top: Vec<&EvaluationPoint> = level0.iter().filter(|p| p.is_valid()).collect();
    if top.is_empty() {
        return Err(SearchError::NoValidPoints);
    }
    top.sort_by(|a, b| a.rank_order(b));
    top.truncate(grid.top_k);

    let mut tasks: BTreeMap<LatticeKey, BTreeSet<u32>> = BTreeMap::new();
    for p in top {
        let thresholds: Vec<u32> = clipped_axis(
            p.threshold_key,
            keys.threshold_half_width,
            keys.threshold_step,
            1,
            KEY_SCALE - 1,
        )
        .collect();
        for k in level1_neighbourhood(p.key, keys.half_width, keys.level1_step) {
            tasks.entry(k).or_default().extend(&thresholds);
        }
    }
    let tasks: Vec<(LatticeKey, Vec<u32>)> = tasks.into_iter().map(|(k, t)| (k, t.into_iter().collect())).collect();
    log::info!("level 1: {} lattice points", tasks.len());
    Ok(evaluate_lattice(evaluator, &tasks, 1, grid, seed))
}

/// Both levels, their Pareto fronts and the selected optimum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub level0: Vec<EvaluationPoint>,
    pub level1: Vec<EvaluationPoint>,
    pub front0: ParetoFront,
    pub front1: ParetoFront,
    /// Minimum combined loss on the level-1 front.
    pub optimum: EvaluationPoint,
}

/// Runs level 0 with `level0_eval` and level 1 with `level1_eval`.
pub fn run_search(
    level0_eval: &dyn PointEvaluator,
    level1_eval: &dyn PointEvaluator,
    grid: &GridSpec,
    seed: u64,
) -> Result<SearchOutcome, SearchError> {
    let level0 = grid_search_level0(level0_eval, grid, seed)?;
    let level1 = grid_search_level1(&level0, level1_eval, grid, seed)?;
    let front0 = pareto_front(&level0);
    let front1 = pareto_front(&level1);
    let optimum = select_optimal(&front1, &grid.weights)?.clone();
    Ok(SearchOutcome {
        level0,
        level1,
        front0,
        front1,
        optimum,
    })
}
